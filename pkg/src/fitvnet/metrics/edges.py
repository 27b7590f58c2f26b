# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Sobel gradient magnitude, used to compare how sharp boundaries remain.

"""
import numpy as np
from scipy import ndimage

from ..errors import ShapeError


def sobel_magnitude(image: np.ndarray) -> np.ndarray:
    """Normalized Sobel magnitude of the channel mean of an image.

    The image is zero padded. The result lies in [0, 1], a constant image
    gives a map of zeros.

    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim == 3:
        gray = image.mean(axis=0)
    elif image.ndim == 2:
        gray = image
    else:
        raise ShapeError(f"Images are (C, H, W) or (H, W) arrays, got {image.shape}")
    if np.ptp(gray) == 0:
        return np.zeros_like(gray)

    gx = ndimage.sobel(gray, axis=1, mode="constant")
    gy = ndimage.sobel(gray, axis=0, mode="constant")
    magnitude = np.hypot(gx, gy)
    return magnitude / magnitude.max()
