# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the Sobel edge map.

"""
import numpy as np
import pytest

from fitvnet.errors import ShapeError
from fitvnet.metrics.edges import sobel_magnitude


def test_constant_image():
    out = sobel_magnitude(np.full((3, 16, 24), 0.7))
    assert out.shape == (16, 24)
    assert not out.any()


def test_vertical_step():
    image = np.zeros((3, 32, 32))
    image[:, :, 16:] = 1.0
    out = sobel_magnitude(image)
    assert out.max() == 1.0
    assert out.min() >= 0.0
    assert out[10, 3] == 0.0
    assert out[10, 15] > 0.5
    assert out[10, 16] > 0.5


def test_grayscale_input():
    image = np.zeros((8, 8))
    image[4:] = 1.0
    out = sobel_magnitude(image)
    assert out[4, 4] > 0.5
    with pytest.raises(ShapeError):
        sobel_magnitude(np.zeros((1, 3, 8, 8)))
