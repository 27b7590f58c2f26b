# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Entry point of the fitvnet executable.

"""
import logging
from typing import List, Optional

from ..errors import FitvError
from ..utils.error_collector import ErrorCollector
from ..utils.log import configure_logging
from . import commands
from .argparse import ArgParser, float_list, float_pair, int_pair

logger = logging.getLogger(__name__)

#: Training objectives, with their short aliases.
VARIANTS = (
    ("base", None),
    ("jsn", None),
    ("jsc", None),
    ("unsupervised", "unsup"),
)

#: Noise kinds, with their short aliases.
NOISE_KINDS = (("awgn", "gauss"), ("mixed", None))


def build_parser() -> ArgParser:
    """Declare the global flags and every command."""
    parser = ArgParser(
        app_name="fitvnet",
        description="Two-stage video denoising: training, inference and metrics.",
    )
    for value, alias in VARIANTS:
        parser.add_choice("variant", value, alias)
    for value, alias in NOISE_KINDS:
        parser.add_choice("noise_kind", value, alias)

    parser.add_argument("--log-dir", help="Directory receiving rotating log files")
    parser.add_argument("--config", help="TOML file holding [train] / [synth] tables")

    synth = parser.add_command(
        "synth", "Write a clean synthetic sequence", commands.cmd_synth
    )
    synth.add_argument("--out", required=True, help="Output directory")
    synth.add_argument("--frames", type=int, help="Number of frames (7)")
    synth.add_argument("--size", type=int_pair("x"), help="HxW (64x64)")
    synth.add_argument("--velocity", type=int_pair(","), help="VX,VY pixels (2,0)")
    synth.add_argument("--contrast", type=float, help="Object contrast (0.5)")
    synth.add_argument("--object-size", type=int, help="Object side in pixels (16)")
    synth.add_argument("--seed", type=int, help="Seed (0)")
    synth.add_argument("--manifest", help="Manifest to append the sequence to")
    synth.add_argument("--id", help="Identifier in the manifest")

    noise = parser.add_command(
        "add-noise", "Render synthetic noise on a sequence", commands.cmd_add_noise
    )
    noise.add_argument("--in", dest="input", required=True, help="Input directory")
    noise.add_argument("--out", required=True, help="Output directory")
    noise.add_argument(
        "--kind", choices="noise_kind", default="awgn", help="Noise kind"
    )
    noise.add_argument("--sigma", type=float, help="Gaussian level, 0-255 scale")
    noise.add_argument("--sp-ratio", type=float, help="Salt-and-pepper fraction")
    noise.add_argument("--seed", type=int, default=0, help="Seed")

    train = parser.add_command(
        "train", "Train the denoiser on a manifest", commands.cmd_train
    )
    train.add_argument("--manifest", required=True, help="JSON lines manifest")
    train.add_argument("--variant", choices="variant", help="Objective (base)")
    train.add_argument("--alpha", type=float, help="First stage loss coefficient")
    train.add_argument("--epochs", type=int, help="Number of epochs (40)")
    train.add_argument("--batch", type=int, help="Windows per step (16)")
    train.add_argument("--patch", type=int, help="Crop side, multiple of 32 (96)")
    train.add_argument(
        "--sigma-range", type=float_pair, help="LO,HI AWGN levels, 0-255 scale"
    )
    train.add_argument("--mixed", action="store_true", help="Train on mixed noise")
    train.add_argument("--lr", type=float, help="ADAM learning rate (1e-4)")
    train.add_argument("--prefetch", type=int, help="Batches prepared ahead (2)")
    train.add_argument("--seed", type=int, help="Seed (0)")
    train.add_argument("--resume", help="Checkpoint to resume from")
    train.add_argument("--out", required=True, help="Checkpoint directory")

    denoise = parser.add_command(
        "denoise", "Denoise every frame of a sequence", commands.cmd_denoise
    )
    denoise.add_argument("--ckpt", required=True, help="Checkpoint")
    denoise.add_argument("--in", dest="input", required=True, help="Noisy frames")
    denoise.add_argument("--out", required=True, help="Output directory")
    denoise.add_argument(
        "--sigma", type=float, required=True, help="Noise level, 0-255 scale"
    )
    denoise.add_argument(
        "--dump-stage1", action="store_true", help="Also write first stage outputs"
    )

    evaluate = parser.add_command(
        "evaluate", "Score denoised frames", commands.cmd_evaluate
    )
    evaluate.add_argument("--pred", required=True, help="Denoised frames")
    evaluate.add_argument("--clean", required=True, help="Clean frames")
    evaluate.add_argument("--report", required=True, help="JSON report to write")

    ad_report = parser.add_command(
        "ad-report", "Deviation index, box overlays and edges", commands.cmd_ad_report
    )
    ad_report.add_argument("--pred", required=True, help="Denoised frames")
    ad_report.add_argument("--clean", required=True, help="Clean frames")
    ad_report.add_argument("--boxes-out", required=True, help="Overlay directory")
    ad_report.add_argument("--report", help="JSON report to write")

    grad = parser.add_command(
        "grad-check", "Finite difference gradient checks", commands.cmd_grad_check
    )
    grad.add_argument("--seed", type=int, default=0, help="Seed")
    grad.add_argument("--tolerance", type=float, default=1e-3, help="Max rel. error")

    bench = parser.add_command(
        "benchmark", "Quality and speed per noise level", commands.cmd_benchmark
    )
    bench.add_argument("--ckpt", required=True, help="Checkpoint")
    bench.add_argument(
        "--clean", required=True, action="append", help="Clean sequence (repeatable)"
    )
    bench.add_argument(
        "--sigmas", type=float_list, default=(15.0, 25.0, 50.0), help="0-255 levels"
    )
    bench.add_argument("--seed", type=int, default=0, help="Seed")
    bench.add_argument("--report", help="JSON file receiving the rows")

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run a command, returning 0 on success and 1 if an error occurred.

    Invalid command lines exit with status 2 through argparse.

    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_dir)
    collector = ErrorCollector()
    try:
        status = args.handler(args, collector)
    except FitvError as e:
        logger.error("%s failed: %s", args.command, e)
        return 1
    if collector.has_errors:
        return 1
    return status
