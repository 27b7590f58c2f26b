# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Average deviation index: how structured the residual of a denoiser is.

The channel averaged difference between the prediction and the clean image
is split into non-overlapping 32 x 32 patches (ragged borders are dropped)
and the population standard deviation of every patch is computed. Patches
whose deviation is strictly above the mean deviation are the ones a denoiser
over-smoothed (typically moving boundaries), the index is their mean
deviation.

"""
from typing import List, Sequence, Tuple

import numpy as np

from ..errors import ShapeError

#: Side of the patches.
AD_PATCH = 32

#: Relative distance to the mean below which a value counts as equal to it.
MEAN_RTOL = 1e-9


def patch_deviations(pred: np.ndarray, clean: np.ndarray) -> np.ndarray:
    """(rows, cols) grid of the standard deviations of the difference patches."""
    pred = np.asarray(pred, dtype=np.float64)
    clean = np.asarray(clean, dtype=np.float64)
    if pred.shape != clean.shape:
        raise ShapeError(f"Images differ in shape: {pred.shape} vs {clean.shape}")
    diff = pred - clean
    if diff.ndim == 3:
        diff = diff.mean(axis=0)
    elif diff.ndim != 2:
        raise ShapeError(f"Images are (C, H, W) or (H, W) arrays, got {pred.shape}")
    h, w = diff.shape
    rows, cols = h // AD_PATCH, w // AD_PATCH
    if rows == 0 or cols == 0:
        raise ShapeError(
            f"The deviation index needs images of at least {AD_PATCH}x{AD_PATCH}, "
            f"got {h}x{w}"
        )
    patches = diff[: rows * AD_PATCH, : cols * AD_PATCH].reshape(
        rows, AD_PATCH, cols, AD_PATCH
    )
    return patches.std(axis=(1, 3))


def _above_mean(values: np.ndarray) -> np.ndarray:
    """Mask of the values strictly above their mean.

    Values equal to the mean up to rounding are never selected, so that a set
    of identical values selects nothing.

    """
    mean = values.mean()
    return (values > mean) & ~np.isclose(values, mean, rtol=MEAN_RTOL, atol=0.0)


def ad_index(pred: np.ndarray, clean: np.ndarray) -> float:
    """Mean deviation of the patches above the mean deviation, 0 if none."""
    deviations = patch_deviations(pred, clean)
    selected = deviations[_above_mean(deviations)]
    if selected.size == 0:
        return 0.0
    return float(selected.mean())


def ad_bounding_boxes(
    pred: np.ndarray, clean: np.ndarray
) -> List[Tuple[int, int, int, int]]:
    """(row, col, height, width) pixel boxes of the selected patches."""
    deviations = patch_deviations(pred, clean)
    return [
        (int(r) * AD_PATCH, int(c) * AD_PATCH, AD_PATCH, AD_PATCH)
        for r, c in zip(*np.nonzero(_above_mean(deviations)))
    ]


def ad_stats(ads: Sequence[float]) -> Tuple[float, float, int]:
    """(mean, max, number of entries strictly above the mean)."""
    values = np.asarray(ads, dtype=np.float64)
    if values.size == 0:
        raise ValueError("ad_stats needs at least one value")
    mean = float(values.mean())
    return mean, float(values.max()), int(np.count_nonzero(_above_mean(values)))
