# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Temporal windows and spatial crops.

"""
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import ShapeError
from ..utils.rng import StreamKey, make_rng
from .sequence import FrameSequence

#: Crop sizes must be multiples of the spatial denoiser divisor.
CROP_DIVISOR = 32


def sample_window(
    seq: FrameSequence, k: int = 2, seed: int = 0, *stream: StreamKey
) -> List[np.ndarray]:
    """Uniformly random run of 2k + 1 consecutive frames."""
    length = 2 * k + 1
    if len(seq) < length:
        raise ShapeError(
            f"Sequence {seq.source} has {len(seq)} frames, windows need {length}"
        )
    rng = make_rng(seed, "window", *stream)
    start = int(rng.integers(0, len(seq) - length + 1))
    return list(seq.frames[start : start + length])


def crop_origin(
    h: int, w: int, size: int, seed: int, *stream: StreamKey
) -> Tuple[int, int]:
    """Random top-left corner of a size x size crop in a h x w frame."""
    if size <= 0 or size % CROP_DIVISOR:
        raise ShapeError(f"Crop size must be a multiple of {CROP_DIVISOR}, got {size}")
    if size > min(h, w):
        raise ShapeError(f"Crop size {size} does not fit in {h}x{w} frames")
    rng = make_rng(seed, "crop", *stream)
    return int(rng.integers(0, h - size + 1)), int(rng.integers(0, w - size + 1))


def crop_window(
    frames: Sequence[np.ndarray], size: int, seed: int = 0, *stream: StreamKey
) -> List[np.ndarray]:
    """Crop every frame of a window at the same random location."""
    if not frames:
        raise ShapeError("Cannot crop an empty window")
    h, w = frames[0].shape[-2:]
    for i, f in enumerate(frames):
        if f.shape[-2:] != (h, w):
            raise ShapeError(f"Frame {i} is {f.shape[-2:]}, frame 0 is {(h, w)}")
    top, left = crop_origin(h, w, size, seed, *stream)
    return [f[..., top : top + size, left : left + size].copy() for f in frames]


def temporal_windows(seq: FrameSequence, k: int = 2) -> List[List[np.ndarray]]:
    """One centred window per frame, the ends being replicated to fill it."""
    last = len(seq) - 1
    return [
        [seq.frames[min(max(t + offset, 0), last)] for offset in range(-k, k + 1)]
        for t in range(len(seq))
    ]
