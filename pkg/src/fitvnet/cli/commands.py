# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Implementation of the commands of the fitvnet executable.

Every command prints its fully resolved configuration as TOML before acting
and returns the exit status of the process.

"""
import json
import logging
import os
from argparse import Namespace
from pathlib import Path
from typing import Any, List, Mapping, Optional

import numpy as np
import rtoml
from PIL import Image, ImageDraw

from ..data.checkpoint import load_checkpoint, restore_net
from ..data.manifest import (
    ManifestEntry,
    append_manifest_entry,
    read_manifest,
    scan_manifest,
)
from ..data.sequence import FrameSequence, load_sequence, quantize, save_sequence
from ..data.synthetic import SynthConfig, synth_sequence
from ..errors import ConfigError, DataError
from ..metrics.deviation import ad_bounding_boxes, ad_index, ad_stats
from ..metrics.edges import sobel_magnitude
from ..metrics.report import format_benchmark, format_columns
from ..models.fitvnet import WINDOW_FRAMES, FitvNet, build_fitvnet
from ..models.gradsuite import run_grad_suite
from ..noise.spec import PIXEL_SCALE, NoiseSpec
from ..noise.synthesis import render_noise
from ..training.config import TrainConfig, TrainState
from ..training.engine import resume_state, run_training
from ..training.evaluation import compare_sequences, denoise_sequence, run_benchmark
from ..utils.error_collector import ErrorCollector
from ..utils.mapping_utils import plain_dict, recursive_update

logger = logging.getLogger(__name__)

#: Name of the side-car file describing the noise of a noisy sequence.
NOISE_SPEC_FILE = "noise.json"

#: Name of the manifest written next to synthetic sequences by default.
MANIFEST_FILE = "manifest.jsonl"


def print_config(command: str, settings: Mapping[str, Any]) -> None:
    """Print the resolved settings of a command as a TOML document."""
    print(rtoml.dumps({command: plain_dict(settings)}), flush=True)


def config_table(args: Namespace, name: str) -> dict:
    """Table of the TOML file passed through --config, empty if absent."""
    path = getattr(args, "config", None)
    if not path:
        return {}
    try:
        data = rtoml.load(Path(path))
    except (OSError, rtoml.TomlParsingError) as e:
        raise ConfigError(f"Cannot read configuration {path}: {e}") from e
    table = data.get(name, {})
    if not isinstance(table, dict):
        raise ConfigError(f"[{name}] in {path} is not a table")
    return table


def check_output(out: Path, *inputs: Optional[Path]) -> None:
    """Refuse to write into a directory the command reads from."""
    for path in inputs:
        if path is not None and out.resolve() == Path(path).resolve():
            raise ConfigError(f"Output {out} would overwrite the input {path}")


# --- synth -------------------------------------------------------------------


def cmd_synth(args: Namespace, collector: ErrorCollector) -> int:
    config = SynthConfig()
    settings = config_table(args, "synth")
    flags = {
        "frames": args.frames,
        "contrast": args.contrast,
        "object_size": args.object_size,
        "seed": args.seed,
    }
    if args.size is not None:
        flags["height"], flags["width"] = args.size
    if args.velocity is not None:
        flags["velocity"] = list(args.velocity)
    recursive_update(settings, {k: v for k, v in flags.items() if v is not None})
    config.update_members_from_config(settings)

    out = Path(args.out)
    manifest = Path(args.manifest) if args.manifest else out.parent / MANIFEST_FILE
    seq_id = args.id or out.name
    resolved = dict(config.config_from_members())
    resolved.update(out=str(out), manifest=str(manifest), id=seq_id)
    print_config("synth", resolved)

    seq = synth_sequence(config)
    save_sequence(seq.frames, out)
    h, w = seq.size
    relative = os.path.relpath(out.resolve(), manifest.resolve().parent)
    entry = ManifestEntry(
        id=seq_id, dir=Path(relative).as_posix(), frames=len(seq), h=h, w=w
    )
    append_manifest_entry(entry, manifest)
    logger.info("Wrote %d frames to %s", len(seq), out)
    return 0


# --- add-noise ---------------------------------------------------------------


def cmd_add_noise(args: Namespace, collector: ErrorCollector) -> int:
    spec = NoiseSpec.from_pixel_scale(args.kind, args.sigma, args.sp_ratio, args.seed)
    src, out = Path(args.input), Path(args.out)
    check_output(out, src)
    resolved = dict(spec.to_dict())
    resolved.update(input=str(src), out=str(out))
    print_config("add-noise", resolved)

    noisy = render_noise(load_sequence(src), spec)
    save_sequence(noisy.frames, out)
    (out / NOISE_SPEC_FILE).write_text(
        json.dumps(spec.to_dict(), indent=2) + "\n", encoding="utf-8"
    )
    logger.info("Rendered %s noise on %d frames", spec.describe(), len(noisy))
    return 0


# --- train -------------------------------------------------------------------


def resolve_train_config(args: Namespace) -> TrainConfig:
    """Defaults, then the [train] table of --config, then explicit flags."""
    settings = config_table(args, "train")
    flags = {
        "variant": args.variant,
        "alpha": args.alpha,
        "epochs": args.epochs,
        "batch_size": args.batch,
        "patch": args.patch,
        "seed": args.seed,
        "prefetch": args.prefetch,
    }
    if args.sigma_range is not None:
        flags["sigma_range"] = [v / PIXEL_SCALE for v in args.sigma_range]
    if args.mixed:
        flags["mixed"] = True
    if args.lr is not None:
        flags["optimizer"] = {"learning_rate": args.lr}
    recursive_update(settings, {k: v for k, v in flags.items() if v is not None})

    config = TrainConfig()
    config.update_members_from_config(settings)
    config.resolve()
    config.validate()
    return config


def load_training_corpus(
    manifest_path: Path, collector: ErrorCollector
) -> List[FrameSequence]:
    """Sequences of a manifest long enough to hold a training window."""
    manifest = read_manifest(manifest_path)
    entries = scan_manifest(manifest, collector, min_frames=WINDOW_FRAMES)
    if collector.has_errors:
        raise DataError(f"Manifest {manifest_path} lists unusable sequences")
    if not entries:
        raise DataError(
            f"No sequence of {manifest_path} has {WINDOW_FRAMES} frames or more"
        )
    return [load_sequence(manifest.directory(e)) for e in entries]


def cmd_train(args: Namespace, collector: ErrorCollector) -> int:
    config = resolve_train_config(args)
    out = Path(args.out)
    resolved = dict(config.config_from_members())
    resolved.update(manifest=str(args.manifest), out=str(out))
    if args.resume:
        resolved["resume"] = str(args.resume)
    print_config("train", resolved)

    sequences = load_training_corpus(Path(args.manifest), collector)
    net = build_fitvnet(config.seed)
    state = TrainState.create(net, config.optimizer)
    if args.resume:
        resume_state(load_checkpoint(args.resume), state)
    written = run_training(config, sequences, out, state)
    logger.info(
        "Training done: %d checkpoints written, targets read by the losses: %s",
        len(written),
        dict(state.target_reads),
    )
    return 0


# --- denoise -----------------------------------------------------------------


def load_net(path: str) -> FitvNet:
    """Network holding the weights of a checkpoint."""
    net = build_fitvnet(0)
    restore_net(load_checkpoint(path), net, optimizer_state=False)
    return net


def cmd_denoise(args: Namespace, collector: ErrorCollector) -> int:
    src, out = Path(args.input), Path(args.out)
    check_output(out, src)
    print_config(
        "denoise",
        {
            "ckpt": str(args.ckpt),
            "input": str(src),
            "out": str(out),
            "sigma": args.sigma,
            "dump_stage1": args.dump_stage1,
        },
    )
    net = load_net(args.ckpt)
    noisy = load_sequence(src)
    if len(noisy) < WINDOW_FRAMES:
        raise DataError(
            f"{src} holds {len(noisy)} frames, at least {WINDOW_FRAMES} are needed"
        )
    denoised, stage1 = denoise_sequence(
        net, noisy, args.sigma / PIXEL_SCALE, args.dump_stage1
    )
    save_sequence(denoised, out)
    for t, outputs in enumerate(stage1):
        save_sequence(outputs, out / "stage1", f"frame_{t:04d}_{{}}.png")
    logger.info("Denoised %d frames into %s", len(denoised), out)
    return 0


# --- evaluate ----------------------------------------------------------------


def cmd_evaluate(args: Namespace, collector: ErrorCollector) -> int:
    print_config(
        "evaluate",
        {"pred": str(args.pred), "clean": str(args.clean), "report": str(args.report)},
    )
    report = compare_sequences(
        load_sequence(args.pred),
        load_sequence(args.clean),
        {"pred": args.pred, "clean": args.clean},
    )
    report.write(args.report)
    print(report.format_table())
    return 0


# --- ad-report ---------------------------------------------------------------


def draw_boxes(image: np.ndarray, boxes, color=(255, 0, 0)) -> Image.Image:
    """RGB rendering of an image with rectangles around (row, col, h, w) boxes."""
    canvas = Image.fromarray(quantize(image).transpose(1, 2, 0), "RGB")
    draw = ImageDraw.Draw(canvas)
    for row, col, h, w in boxes:
        draw.rectangle([col, row, col + w - 1, row + h - 1], outline=color)
    return canvas


def edge_image(image: np.ndarray) -> Image.Image:
    """Grayscale rendering of the Sobel magnitude of an image."""
    return Image.fromarray(quantize(sobel_magnitude(image)), "L")


def cmd_ad_report(args: Namespace, collector: ErrorCollector) -> int:
    out = Path(args.boxes_out)
    check_output(out, Path(args.pred), Path(args.clean))
    print_config(
        "ad-report",
        {"pred": str(args.pred), "clean": str(args.clean), "boxes_out": str(out)},
    )
    pred, clean = load_sequence(args.pred), load_sequence(args.clean)
    report = compare_sequences(pred, clean, {"pred": args.pred, "clean": args.clean})

    out.mkdir(parents=True, exist_ok=True)
    lines = []
    for t, (p, c) in enumerate(zip(pred.frames, clean.frames)):
        boxes = ad_bounding_boxes(p, c)
        try:
            draw_boxes(p, boxes).save(out / f"boxes_{t:04d}.png")
            edge_image(p).save(out / f"sobel_pred_{t:04d}.png")
            edge_image(c).save(out / f"sobel_clean_{t:04d}.png")
        except OSError as e:
            raise DataError(f"Cannot write the overlays of frame {t}: {e}") from e
        lines.append((f"{t:04d}", f"{ad_index(p, c):.5f}", str(len(boxes))))

    ad_avg, ad_max, ad_count = ad_stats([row.ad for row in report.rows])
    footer = [
        ("AD_avg", f"{ad_avg:.5f}", ""),
        ("AD_max", f"{ad_max:.5f}", ""),
        ("#AD", str(ad_count), ""),
    ]
    print(format_columns(("frame", "AD", "boxes"), lines, footer))
    if args.report:
        report.write(args.report)
    return 0


# --- grad-check --------------------------------------------------------------


def cmd_grad_check(args: Namespace, collector: ErrorCollector) -> int:
    print_config("grad-check", {"seed": args.seed, "tolerance": args.tolerance})
    results = run_grad_suite(args.seed, args.tolerance)
    lines = [
        (r.name, f"{r.error:.3e}", f"{r.seconds:.2f}", "ok" if r.passed else "FAILED")
        for r in results
    ]
    print(format_columns(("check", "max rel. error", "s", "status"), lines))
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.error("Gradient checks failed: %s", ", ".join(failed))
        return 1
    return 0


# --- benchmark ---------------------------------------------------------------


def cmd_benchmark(args: Namespace, collector: ErrorCollector) -> int:
    print_config(
        "benchmark",
        {
            "ckpt": str(args.ckpt),
            "clean": [str(c) for c in args.clean],
            "sigmas": list(args.sigmas),
            "seed": args.seed,
            "report": str(args.report) if args.report else "",
        },
    )
    net = load_net(args.ckpt)
    sequences = [load_sequence(c) for c in args.clean]
    rows = run_benchmark(net, sequences, args.sigmas, args.seed)
    print(format_benchmark(rows))
    if args.report:
        path = Path(args.report)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(
            json.dumps([r.to_dict() for r in rows], indent=2) + "\n", encoding="utf-8"
        )
    return 0
