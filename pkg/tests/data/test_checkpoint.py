# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the checkpoint format.

"""
import struct
from collections import OrderedDict

import numpy as np
import pytest

from fitvnet.data.checkpoint import (
    COUNTER_BASE,
    MAGIC,
    Checkpoint,
    checkpoint_from_net,
    decode_checkpoint,
    decode_counter,
    encode_checkpoint,
    encode_counter,
    load_checkpoint,
    restore_net,
    save_checkpoint,
)
from fitvnet.errors import CheckpointError
from fitvnet.models.fitvnet import build_fitvnet


@pytest.fixture
def small():
    """Checkpoint holding a few tensors of various ranks."""
    tensors = OrderedDict(
        [
            ("a.weight", np.arange(24, dtype=np.float32).reshape(2, 3, 2, 2)),
            ("a.bias", np.array([0.5, -1.5], dtype=np.float32)),
            ("adam_t/a.weight", np.array([0.0, 3.0], dtype=np.float32)),
        ]
    )
    return Checkpoint(variant="jsc", epoch=2, iteration=40, tensors=tensors)


def test_encoding_layout(small):
    data = encode_checkpoint(small)
    assert data[:4] == MAGIC
    version, count = struct.unpack("<II", data[4:12])
    assert version == 1
    # Three tensors plus epoch, iteration and variant metadata.
    assert count == 6
    (length,) = struct.unpack("<H", data[12:14])
    assert data[14 : 14 + length] == b"a.weight"


def test_decode(small):
    decoded = decode_checkpoint(encode_checkpoint(small))
    assert (decoded.variant, decoded.epoch, decoded.iteration) == ("jsc", 2, 40)
    assert list(decoded.tensors) == list(small.tensors)
    for name, value in small.tensors.items():
        np.testing.assert_array_equal(decoded.tensors[name], value)
    assert decoded.tensors["adam_t/a.weight"].shape == (2,)
    assert list(decoded.weights()) == ["a.weight", "a.bias"]


def test_save_load_save_is_bit_identical(tmp_path, small):
    first = save_checkpoint(small, tmp_path / "a.fitv")
    second = save_checkpoint(load_checkpoint(first), tmp_path / "b.fitv")
    assert first.read_bytes() == second.read_bytes()
    assert sorted(p.name for p in tmp_path.iterdir()) == ["a.fitv", "b.fitv"]


@pytest.mark.parametrize(
    "corrupt",
    [
        lambda d: b"XITV" + d[4:],
        lambda d: d[:4] + struct.pack("<I", 2) + d[8:],
        lambda d: d[:-9],
        lambda d: d + b"\0",
        lambda d: d[:20] + bytes([d[20] ^ 0xFF]) + d[21:],
        lambda d: d[:-1] + bytes([d[-1] ^ 0x01]),
    ],
    ids=["magic", "version", "truncated", "trailing", "payload", "checksum"],
)
def test_corruption_is_detected(small, corrupt):
    with pytest.raises(CheckpointError):
        decode_checkpoint(corrupt(encode_checkpoint(small)))


def test_load_missing_file(tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "missing.fitv")


def test_network_round_trip(tmp_path):
    net = build_fitvnet(0)
    p = net.parameters()[0]
    p.adam_m = np.full(p.shape, 0.25, dtype=np.float32)
    p.step_count = 12
    path = save_checkpoint(
        checkpoint_from_net(net, "base", epoch=3, iteration=30), tmp_path / "n.fitv"
    )

    other = build_fitvnet(1)
    epoch, iteration = restore_net(load_checkpoint(path), other)
    assert (epoch, iteration) == (3, 30)
    for a, b in zip(net.parameters(), other.parameters()):
        np.testing.assert_array_equal(a.value.data, b.value.data)
    restored = other.parameters()[0]
    assert restored.step_count == 12
    np.testing.assert_array_equal(restored.adam_m, 0.25)


@pytest.mark.parametrize(
    "value",
    [0, 1, COUNTER_BASE - 1, COUNTER_BASE + 1, 3 * COUNTER_BASE + 7, 10**12 + 1],
)
def test_counter_halves(value):
    halves = encode_counter(value)
    assert halves.dtype == np.float32
    assert decode_counter(halves) == value


@pytest.mark.parametrize(
    "halves",
    [[1.0], [0.0, -1.0], [0.0, 0.5], [-1.0, 0.0], [0.0, float(COUNTER_BASE)]],
)
def test_invalid_counter_halves(halves):
    with pytest.raises(CheckpointError):
        decode_counter(np.array(halves, dtype=np.float32))


def test_counter_out_of_range():
    for value in (-1, COUNTER_BASE**2):
        with pytest.raises(CheckpointError):
            encode_counter(value)


def test_large_counters_survive_round_trip(tmp_path):
    net = build_fitvnet(0)
    p = net.parameters()[0]
    p.step_count = 2**25 + 3
    iteration = 2**24 + 1
    path = save_checkpoint(
        checkpoint_from_net(net, "jsc", epoch=2**24 + 5, iteration=iteration),
        tmp_path / "large.fitv",
    )

    other = build_fitvnet(1)
    assert restore_net(load_checkpoint(path), other) == (2**24 + 5, iteration)
    assert other.parameters()[0].step_count == 2**25 + 3


def test_restore_weights_only(tmp_path):
    net = build_fitvnet(0)
    checkpoint = checkpoint_from_net(net, include_optimizer=False)
    assert not any("/" in name for name in checkpoint.tensors)

    other = build_fitvnet(1)
    other.parameters()[0].step_count = 5
    with pytest.raises(CheckpointError):
        restore_net(checkpoint, other)
    restore_net(checkpoint, other, optimizer_state=False)
    assert other.parameters()[0].step_count == 0


def test_restore_rejects_mismatches():
    net = build_fitvnet(0)
    checkpoint = checkpoint_from_net(net, include_optimizer=False)
    name = "block2.dec_conv1b.bias"
    reference = build_fitvnet(1)
    before = reference.parameters()[0].value.data.copy()

    checkpoint.tensors[name] = np.zeros((1, 4, 1, 1), dtype=np.float32)
    with pytest.raises(CheckpointError, match=name):
        restore_net(checkpoint, reference, optimizer_state=False)
    del checkpoint.tensors[name]
    with pytest.raises(CheckpointError, match=name):
        restore_net(checkpoint, reference, optimizer_state=False)
    np.testing.assert_array_equal(reference.parameters()[0].value.data, before)
