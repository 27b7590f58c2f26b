# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test frame sequences and their storage.

"""
import numpy as np
import pytest
from PIL import Image

from fitvnet.data.sequence import (
    FrameSequence,
    list_frame_files,
    load_image,
    load_sequence,
    quantize,
    save_image,
    save_sequence,
)
from fitvnet.errors import DataError, ShapeError


def test_sequence_validation():
    with pytest.raises(ShapeError):
        FrameSequence([])
    with pytest.raises(ShapeError):
        FrameSequence([np.zeros((4, 8, 8))])
    with pytest.raises(ShapeError):
        FrameSequence([np.zeros((3, 8, 8)), np.zeros((3, 8, 9))])


def test_sequence_accessors(clean_sequence):
    assert len(clean_sequence) == 7
    assert clean_sequence.size == (64, 64)
    assert clean_sequence.stack().shape == (7, 3, 64, 64)
    assert clean_sequence.frames[0].dtype == np.float32
    derived = clean_sequence.derive(clean_sequence.frames[:2])
    assert derived.source == clean_sequence.source
    assert derived.applied_noise is None


def test_quantize():
    values = np.array([-0.2, 0.0, 0.6 / 255, 1.4 / 255, 0.5, 1.0, 3.0])
    assert quantize(values).tolist() == [0, 0, 1, 1, 128, 255, 255]


def test_save_and_load(tmp_path, clean_sequence):
    paths = save_sequence(clean_sequence.frames, tmp_path / "seq")
    assert [p.name for p in paths][:2] == ["frame_0000.png", "frame_0001.png"]
    loaded = load_sequence(tmp_path / "seq")
    assert len(loaded) == 7
    assert loaded.source == str(tmp_path / "seq")
    # 8 bits storage loses at most half a quantization step.
    np.testing.assert_allclose(
        loaded.stack(), clean_sequence.stack(), atol=0.5 / 255 + 1e-6
    )


def test_frame_order_and_filtering(tmp_path):
    for name in ("b.png", "a.png", "c.bmp"):
        save_image(np.zeros((3, 4, 4)), tmp_path / name)
    (tmp_path / "notes.txt").write_text("not a frame")
    (tmp_path / "sub.png").mkdir()
    assert [p.name for p in list_frame_files(tmp_path)] == ["a.png", "b.png", "c.bmp"]


def test_load_errors(tmp_path):
    with pytest.raises(DataError):
        load_sequence(tmp_path / "missing")
    with pytest.raises(DataError):
        load_sequence(tmp_path)

    (tmp_path / "broken.png").write_bytes(b"not a png")
    with pytest.raises(DataError):
        load_image(tmp_path / "broken.png")

    mixed = tmp_path / "mixed"
    save_image(np.zeros((3, 4, 4)), mixed / "a.png")
    save_image(np.zeros((3, 4, 6)), mixed / "b.png")
    with pytest.raises(DataError):
        load_sequence(mixed)


def test_grayscale_images_are_expanded(tmp_path):
    Image.fromarray(np.full((4, 5), 51, dtype=np.uint8), "L").save(tmp_path / "g.png")
    image = load_image(tmp_path / "g.png")
    assert image.shape == (3, 4, 5)
    np.testing.assert_allclose(image, 0.2, rtol=1e-6)


def test_save_image_shape():
    with pytest.raises(ShapeError):
        save_image(np.zeros((4, 4)), "unused.png")
