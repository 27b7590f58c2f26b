# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test temporal windows and crops.

"""
import numpy as np
import pytest

from fitvnet.data.sequence import FrameSequence
from fitvnet.data.windows import (
    crop_origin,
    crop_window,
    sample_window,
    temporal_windows,
)
from fitvnet.errors import ShapeError


@pytest.fixture
def numbered():
    """Seven 64x64 frames whose values equal their index."""
    return FrameSequence([np.full((3, 64, 64), float(t)) for t in range(7)])


def _indices(window):
    return [int(f[0, 0, 0]) for f in window]


def test_sample_window_is_consecutive(numbered):
    starts = set()
    for i in range(50):
        indices = _indices(sample_window(numbered, 2, 0, i))
        assert indices == list(range(indices[0], indices[0] + 5))
        starts.add(indices[0])
    assert starts == {0, 1, 2}


def test_sample_window_determinism(numbered):
    assert _indices(sample_window(numbered, 2, 3, "a")) == _indices(
        sample_window(numbered, 2, 3, "a")
    )


def test_sample_window_too_short():
    seq = FrameSequence([np.zeros((3, 32, 32))] * 4)
    with pytest.raises(ShapeError):
        sample_window(seq, 2)


def test_crop_origin():
    for i in range(20):
        top, left = crop_origin(64, 96, 32, 0, i)
        assert 0 <= top <= 32
        assert 0 <= left <= 64
    assert crop_origin(32, 32, 32, 5) == (0, 0)
    with pytest.raises(ShapeError):
        crop_origin(64, 64, 48, 0)
    with pytest.raises(ShapeError):
        crop_origin(64, 32, 64, 0)


def test_crop_window_shares_location(rng):
    frames = [rng.random((3, 64, 96)) for _ in range(3)]
    crops = crop_window(frames, 32, 1, "x")
    top, left = crop_origin(64, 96, 32, 1, "x")
    for frame, crop in zip(frames, crops):
        assert crop.shape == (3, 32, 32)
        np.testing.assert_array_equal(crop, frame[:, top : top + 32, left : left + 32])
    with pytest.raises(ShapeError):
        crop_window([], 32)
    with pytest.raises(ShapeError):
        crop_window([frames[0], frames[1][:, :32]], 32)


def test_temporal_windows_replicate_ends(numbered):
    windows = temporal_windows(numbered, 2)
    assert len(windows) == 7
    assert _indices(windows[0]) == [0, 0, 0, 1, 2]
    assert _indices(windows[3]) == [1, 2, 3, 4, 5]
    assert _indices(windows[6]) == [4, 5, 6, 6, 6]
