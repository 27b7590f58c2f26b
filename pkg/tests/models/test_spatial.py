# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the spatial denoiser.

"""
import numpy as np
import pytest

from fitvnet.errors import ShapeError
from fitvnet.models.fitvnet import trace_shapes
from fitvnet.models.layers import param_count
from fitvnet.models.spatial import build_spatial_denoiser, spatial_forward
from fitvnet.tensor.core import Tensor

#: (name, cin, cout) of every layer, written out independently of the schedule.
SPATIAL_TABLE = [
    ("enc_conv0", 3, 48),
    *[(f"enc_conv{i}{s}", 48, 48) for i in range(1, 6) for s in "ab"],
    ("enc_conv6", 48, 48),
    ("dec_conv5a", 96, 96),
    ("dec_conv5b", 96, 96),
    ("dec_conv4a", 144, 96),
    ("dec_conv4b", 96, 96),
    ("dec_conv3a", 144, 96),
    ("dec_conv3b", 96, 96),
    ("dec_conv2a", 144, 96),
    ("dec_conv2b", 96, 96),
    ("dec_conv1a", 99, 64),
    ("dec_conv1b", 64, 32),
    ("dec_conv0", 32, 3),
]


def test_parameter_count():
    model = build_spatial_denoiser(0)
    expected = sum(cout * (cin * 9 + 1) for _, cin, cout in SPATIAL_TABLE)
    assert param_count(model.parameters()) == expected
    assert [layer.name for layer in model.weights.layers] == [
        name for name, _, _ in SPATIAL_TABLE
    ]


def test_layer_shapes():
    trace = trace_shapes(build_spatial_denoiser(0), (1, 3, 64, 64))
    assert trace["enc_conv0"] == (1, 48, 64, 64)
    for stage in range(1, 6):
        size = 64 >> stage
        assert trace[f"enc_conv{stage}b"] == (1, 48, size, size)
    assert trace["enc_conv6"] == (1, 48, 2, 2)
    assert trace["dec_concat5"] == (1, 96, 4, 4)
    assert trace["dec_conv5b"] == (1, 96, 4, 4)
    assert trace["dec_concat2"] == (1, 144, 32, 32)
    assert trace["dec_concat1"] == (1, 99, 64, 64)
    assert trace["dec_conv1b"] == (1, 32, 64, 64)
    assert trace["dec_conv0"] == (1, 3, 64, 64)


def test_input_validation():
    model = build_spatial_denoiser(0)
    with pytest.raises(ShapeError):
        spatial_forward(model, Tensor(np.zeros((1, 3, 48, 64))))
    with pytest.raises(ShapeError):
        spatial_forward(model, Tensor(np.zeros((1, 1, 32, 32))))


def test_inference_clamps_and_detaches(rng, identity_fitvnet):
    model = identity_fitvnet.spatial
    x = rng.uniform(0, 1, size=(2, 3, 32, 32)).astype(np.float32)
    out = spatial_forward(model, Tensor(x))
    np.testing.assert_array_equal(out.data, x)
    assert out.requires_grad

    shifted = spatial_forward(model, Tensor(x + 0.5), inference=True)
    assert not shifted.requires_grad
    assert shifted.data.max() == 1.0
    assert shifted.data.min() >= 0.5
