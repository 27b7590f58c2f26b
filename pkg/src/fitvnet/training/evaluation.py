# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Inference over whole sequences, evaluation and benchmarking.

"""
import logging
import time
from typing import Callable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from atom.api import Atom, Float, List as AList, Str, Typed

from ..data.sequence import FrameSequence
from ..data.windows import temporal_windows
from ..errors import DataError
from ..metrics.deviation import ad_index
from ..metrics.quality import psnr, ssim
from ..metrics.report import BenchmarkRow, MetricsReport, MetricsRow
from ..models.fitvnet import (
    WINDOW_HALF_WIDTH,
    FitvNet,
    fitvnet_forward,
    stage1_only_forward,
)
from ..noise.spec import PIXEL_SCALE, NoiseSpec
from ..noise.synthesis import make_noise_map, render_noise
from ..tensor.core import Tensor

logger = logging.getLogger(__name__)

#: Callable mapping (net, frames, noise map) onto the denoised centre frame.
Forward = Callable[[FitvNet, Sequence[Tensor], Tensor], Tensor]


class EvalSample(Atom):
    """A noisy five frame window and the clean version of its centre."""

    #: Identifier used in the report rows.
    frame_id = Str()

    #: Five (3, H, W) noisy frames.
    frames = AList(Typed(np.ndarray))

    #: (3, H, W) clean centre frame.
    clean = Typed(np.ndarray)

    #: Noise level fed to the noise map.
    sigma = Float()


def full_forward(net: FitvNet, frames: Sequence[Tensor], noise_map: Tensor) -> Tensor:
    return fitvnet_forward(net, frames, noise_map, inference=True)[0]


def stage1_forward(
    net: FitvNet, frames: Sequence[Tensor], noise_map: Tensor
) -> Tensor:
    return stage1_only_forward(net, frames)


def window_tensors(
    frames: Sequence[np.ndarray], sigma: float
) -> Tuple[List[Tensor], Tensor]:
    """Batch of one window and its noise map."""
    tensors = [Tensor(f[None], tag="noisy") for f in frames]
    h, w = frames[0].shape[-2:]
    spec = NoiseSpec(sigma=sigma)
    return tensors, make_noise_map(spec, h, w, tensors[0].dtype.type)


def denoise_sequence(
    net: FitvNet,
    noisy: FrameSequence,
    sigma: float,
    dump_stage1: bool = False,
) -> Tuple[List[np.ndarray], List[List[np.ndarray]]]:
    """Denoise every frame of a sequence.

    The ends of the sequence are replicated to fill the windows, so that the
    output has as many frames as the input.

    Returns
    -------
    denoised : list[np.ndarray]
        One clamped (3, H, W) frame per input frame.

    stage1 : list[list[np.ndarray]]
        When dump_stage1 is set, the five first stage outputs of every window,
        empty otherwise.

    """
    denoised, stage1 = [], []
    for t, window in enumerate(temporal_windows(noisy, WINDOW_HALF_WIDTH)):
        frames, noise_map = window_tensors(window, sigma)
        center, first = fitvnet_forward(net, frames, noise_map, inference=True)
        denoised.append(center.data[0])
        if dump_stage1:
            stage1.append([s.data[0] for s in first])
        logger.debug("Denoised frame %d of %s", t, noisy.source)
    return denoised, stage1


def make_eval_samples(
    clean: FrameSequence, spec: NoiseSpec, prefix: str = ""
) -> List[EvalSample]:
    """Noise a clean sequence and cut it into one window per frame."""
    noisy = render_noise(clean, spec)
    return [
        EvalSample(
            frame_id=f"{prefix}{t:04d}",
            frames=list(window),
            clean=clean.frames[t],
            sigma=spec.sigma,
        )
        for t, window in enumerate(temporal_windows(noisy, WINDOW_HALF_WIDTH))
    ]


def frame_row(frame_id: str, pred: np.ndarray, clean: np.ndarray) -> MetricsRow:
    """PSNR, SSIM and AD of a prediction."""
    return MetricsRow(
        frame_id=frame_id,
        psnr=psnr(pred, clean),
        ssim=ssim(pred, clean),
        ad=ad_index(pred, clean),
    )


def evaluate(
    net: FitvNet,
    samples: Iterable[EvalSample],
    forward: Optional[Forward] = None,
    provenance: Optional[Mapping[str, str]] = None,
) -> MetricsReport:
    """Denoise the centre frame of every sample and score it.

    forward defaults to the full clamped pipeline.

    """
    forward = forward or full_forward
    rows = []
    for sample in samples:
        frames, noise_map = window_tensors(sample.frames, sample.sigma)
        pred = forward(net, frames, noise_map).data[0]
        rows.append(frame_row(sample.frame_id, pred, sample.clean))
    report = MetricsReport.from_rows(rows, provenance)
    if rows:
        logger.info(
            "Evaluated %d frames: PSNR %.3f dB, SSIM %.4f",
            len(rows),
            report.corpus.psnr_mean,
            report.corpus.ssim_mean,
        )
    return report


def compare_sequences(
    pred: FrameSequence,
    clean: FrameSequence,
    provenance: Optional[Mapping[str, str]] = None,
) -> MetricsReport:
    """Score already denoised frames against their clean versions."""
    if len(pred) != len(clean):
        raise DataError(
            f"{len(pred)} predicted frames ({pred.source}) but {len(clean)} clean "
            f"frames ({clean.source})"
        )
    rows = [
        frame_row(f"{t:04d}", p, c)
        for t, (p, c) in enumerate(zip(pred.frames, clean.frames))
    ]
    return MetricsReport.from_rows(rows, provenance)


def run_benchmark(
    net: FitvNet,
    sequences: Sequence[FrameSequence],
    sigmas255: Sequence[float],
    seed: int = 0,
) -> List[BenchmarkRow]:
    """Quality and timing of the full pipeline and of its first stage alone."""
    rows = []
    for sigma255 in sigmas255:
        samples = []
        for i, seq in enumerate(sequences):
            spec = NoiseSpec.awgn(sigma255 / PIXEL_SCALE, seed)
            samples += make_eval_samples(seq, spec, f"{i:03d}/")
        if not samples:
            raise DataError("The benchmark needs at least one frame")

        noisy = [
            psnr(np.clip(s.frames[WINDOW_HALF_WIDTH], 0.0, 1.0), s.clean)
            for s in samples
        ]
        full = evaluate(net, samples, full_forward)
        first = evaluate(net, samples, stage1_forward)
        ms_full = time_forward(net, samples, full_forward)
        ms_stage1 = time_forward(net, samples, stage1_forward)

        rows.append(
            BenchmarkRow(
                sigma255=float(sigma255),
                noisy_psnr=float(np.mean(noisy)),
                psnr=full.corpus.psnr_mean,
                ssim=full.corpus.ssim_mean,
                stage1_psnr=first.corpus.psnr_mean,
                ms_full=ms_full,
                ms_stage1=ms_stage1,
            )
        )
        logger.info(
            "sigma %g: %.2f dB (%.1f ms/frame)", sigma255, rows[-1].psnr, ms_full
        )
    return rows


def time_forward(
    net: FitvNet, samples: Sequence[EvalSample], forward: Forward
) -> float:
    """Milliseconds per frame spent in forward, metrics excluded."""
    if not samples:
        raise DataError("Cannot time an empty set of samples")
    inputs = [window_tensors(s.frames, s.sigma) for s in samples]
    start = time.perf_counter()
    for frames, noise_map in inputs:
        forward(net, frames, noise_map)
    return (time.perf_counter() - start) * 1e3 / len(inputs)
