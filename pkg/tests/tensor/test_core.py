# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the tensor type and the reverse sweep.

"""
import threading

import numpy as np
import pytest

from fitvnet.errors import GraphError, ShapeError
from fitvnet.tensor.core import Tensor, is_grad_enabled, no_grad
from fitvnet.tensor.ops import add, mse_loss, scale


def test_tensor_shape_validation():
    with pytest.raises(ShapeError):
        Tensor(np.zeros((3, 4, 4)))
    with pytest.raises(ShapeError):
        Tensor(np.zeros((1, 0, 4, 4)))


def test_integer_data_is_promoted():
    t = Tensor(np.ones((1, 1, 2, 2), dtype=np.int64))
    assert t.dtype == np.float32


def test_item():
    assert Tensor(np.full((1, 1, 1, 1), 2.5)).item() == 2.5
    with pytest.raises(ShapeError):
        Tensor(np.zeros((1, 1, 2, 1))).item()


def test_backward_accumulates_on_shared_leaves():
    x = Tensor(np.ones((1, 1, 2, 2)), requires_grad=True)
    y = add(x, scale(x, 3.0))
    y.backward(np.ones((1, 1, 2, 2)))
    np.testing.assert_allclose(x.grad, 4.0)

    # A second sweep adds to the existing gradient.
    y.backward(np.ones((1, 1, 2, 2)))
    np.testing.assert_allclose(x.grad, 8.0)
    x.zero_grad()
    assert x.grad is None


def test_backward_scalar_default():
    x = Tensor(np.full((1, 1, 2, 2), 0.5), requires_grad=True)
    target = Tensor(np.zeros((1, 1, 2, 2)))
    mse_loss(x, target).backward()
    np.testing.assert_allclose(x.grad, 2 * 0.5 / 4)


def test_backward_errors():
    x = Tensor(np.ones((1, 1, 2, 2)), requires_grad=True)
    with pytest.raises(GraphError):
        Tensor(np.ones((1, 1, 1, 1))).backward()
    with pytest.raises(GraphError):
        scale(x, 2.0).backward()
    with pytest.raises(ShapeError):
        scale(x, 2.0).backward(np.ones((1, 1, 1, 2)))


def test_constants_receive_no_gradient():
    x = Tensor(np.ones((1, 1, 2, 2)), requires_grad=True)
    c = Tensor(np.ones((1, 1, 2, 2)))
    add(x, c).backward(np.ones((1, 1, 2, 2)))
    assert c.grad is None
    assert x.grad is not None


def test_no_grad():
    x = Tensor(np.ones((1, 1, 2, 2)), requires_grad=True)
    with no_grad():
        assert not is_grad_enabled()
        y = scale(x, 2.0)
    assert is_grad_enabled()
    assert not y.requires_grad
    assert y.is_leaf


def test_no_grad_is_thread_local():
    seen = []

    def record_grad_mode():
        seen.append(is_grad_enabled())

    with no_grad():
        thread = threading.Thread(target=record_grad_mode)
        thread.start()
        thread.join()
    assert seen == [True]
