# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the composition of the two stages.

"""
import numpy as np
import pytest

from fitvnet.errors import ShapeError
from fitvnet.models.fitvnet import (
    WINDOW_FRAMES,
    build_fitvnet,
    fitvnet_forward,
    stage1_only_forward,
    trace_shapes,
)
from fitvnet.models.layers import param_count
from fitvnet.tensor.core import Tensor


def _window(rng, size=32):
    return [
        Tensor(rng.uniform(0, 1, size=(1, 3, size, size)).astype(np.float32))
        for _ in range(WINDOW_FRAMES)
    ]


def test_parameters(fitvnet_model):
    names = list(fitvnet_model.named_arrays())
    assert names[0] == "spatial.enc_conv0.weight"
    assert len(set(names)) == len(names)
    total = sum(param_count(w) for w in fitvnet_model.weight_sets())
    assert param_count(fitvnet_model.parameters()) == total
    assert fitvnet_model.k == 2


def test_blocks_are_initialized_independently(fitvnet_model):
    a = fitvnet_model.block1.weights.weight("enc_conv1b").value.data
    b = fitvnet_model.block2.weights.weight("enc_conv1b").value.data
    assert not np.array_equal(a, b)


def test_forward_shapes(rng, fitvnet_model):
    frames = _window(rng)
    noise_map = Tensor(np.full((1, 1, 32, 32), 0.1, dtype=np.float32))
    center, stage1 = fitvnet_forward(fitvnet_model, frames, noise_map, inference=True)
    assert center.shape == (1, 3, 32, 32)
    assert len(stage1) == WINDOW_FRAMES
    assert all(0.0 <= s.data.min() and s.data.max() <= 1.0 for s in stage1)
    assert not center.requires_grad


def test_training_forward_records_graph(rng, fitvnet_model):
    frames = _window(rng)
    noise_map = Tensor(np.zeros((1, 1, 32, 32), dtype=np.float32))
    center, stage1 = fitvnet_forward(fitvnet_model, frames, noise_map)
    assert center.requires_grad
    assert all(s.requires_grad for s in stage1)


def test_zero_blocks_return_centre_of_stage1(rng):
    net = build_fitvnet(1)
    net.block1.weights.zero_()
    net.block2.weights.zero_()
    frames = _window(rng)
    noise_map = Tensor(np.zeros((1, 1, 32, 32), dtype=np.float32))
    center, stage1 = fitvnet_forward(net, frames, noise_map)
    np.testing.assert_array_equal(center.data, stage1[2].data)


def test_stage1_only(rng, fitvnet_model):
    frames = _window(rng)
    out = stage1_only_forward(fitvnet_model, frames)
    _, stage1 = fitvnet_forward(
        fitvnet_model, frames, Tensor(np.zeros((1, 1, 32, 32))), inference=True
    )
    np.testing.assert_array_equal(out.data, stage1[2].data)


def test_input_validation(rng, fitvnet_model):
    noise_map = Tensor(np.zeros((1, 1, 32, 32)))
    with pytest.raises(ShapeError):
        fitvnet_forward(fitvnet_model, _window(rng)[:4], noise_map)
    with pytest.raises(ShapeError):
        stage1_only_forward(fitvnet_model, _window(rng)[:3])
    frames = _window(rng)
    frames[3] = Tensor(np.zeros((1, 3, 64, 64), dtype=np.float32))
    with pytest.raises(ShapeError):
        fitvnet_forward(fitvnet_model, frames, noise_map)


def test_trace_rejects_unknown_models(fitvnet_model):
    with pytest.raises(TypeError):
        trace_shapes(fitvnet_model, (1, 3, 64, 64))
