# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Full reference image quality: PSNR and single-scale SSIM.

Images are (C, H, W) or (H, W) arrays with values in [0, 1]. Computations
are carried out in float64.

"""
import numpy as np
from scipy import ndimage

from ..errors import ShapeError

#: PSNR reported for (numerically) identical images.
PSNR_CAP = 120.0

#: Mean squared errors below this value are considered zero.
MSE_FLOOR = 1e-12

#: Standard deviation of the Gaussian SSIM window.
SSIM_SIGMA = 1.5

#: Window truncation, in standard deviations, giving an 11 x 11 window.
SSIM_TRUNCATE = 3.5

#: Half width of the SSIM window.
SSIM_RADIUS = int(SSIM_TRUNCATE * SSIM_SIGMA + 0.5)

SSIM_K1 = 0.01
SSIM_K2 = 0.03


def psnr(pred: np.ndarray, clean: np.ndarray, peak: float = 1.0) -> float:
    """Peak signal to noise ratio in dB, capped at 120 dB."""
    pred, clean = _pair(pred, clean)
    mse = float(np.mean(np.square(pred - clean)))
    if mse < MSE_FLOOR:
        return PSNR_CAP
    return min(PSNR_CAP, float(10.0 * np.log10(peak * peak / mse)))


def ssim(pred: np.ndarray, clean: np.ndarray, data_range: float = 1.0) -> float:
    """Mean structural similarity over the channels.

    Local statistics use an 11 x 11 Gaussian window of standard deviation
    1.5, the map is averaged over the positions where the window fits in the
    image.

    """
    pred, clean = _pair(pred, clean)
    if pred.ndim == 2:
        pred, clean = pred[None], clean[None]
    size = 2 * SSIM_RADIUS + 1
    if min(pred.shape[-2:]) < size:
        raise ShapeError(
            f"SSIM needs images of at least {size}x{size}, got "
            f"{pred.shape[-2]}x{pred.shape[-1]}"
        )
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    values = [_ssim_plane(p, c, c1, c2) for p, c in zip(pred, clean)]
    return float(np.mean(values))


def _pair(pred: np.ndarray, clean: np.ndarray):
    pred = np.asarray(pred, dtype=np.float64)
    clean = np.asarray(clean, dtype=np.float64)
    if pred.shape != clean.shape:
        raise ShapeError(f"Images differ in shape: {pred.shape} vs {clean.shape}")
    if pred.ndim not in (2, 3):
        raise ShapeError(f"Images are (C, H, W) or (H, W) arrays, got {pred.shape}")
    return pred, clean


def _ssim_plane(x: np.ndarray, y: np.ndarray, c1: float, c2: float) -> float:
    def blur(a: np.ndarray) -> np.ndarray:
        return ndimage.gaussian_filter(a, SSIM_SIGMA, truncate=SSIM_TRUNCATE)

    mu_x, mu_y = blur(x), blur(y)
    sigma_xx = blur(x * x) - mu_x * mu_x
    sigma_yy = blur(y * y) - mu_y * mu_y
    sigma_xy = blur(x * y) - mu_x * mu_y
    numerator = (2 * mu_x * mu_y + c1) * (2 * sigma_xy + c2)
    denominator = (mu_x * mu_x + mu_y * mu_y + c1) * (sigma_xx + sigma_yy + c2)
    r = SSIM_RADIUS
    return float(np.mean((numerator / denominator)[r:-r, r:-r]))
