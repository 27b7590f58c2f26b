# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Differentiable operations used by the spatial and spatiotemporal networks.

Only what the two architectures need is provided: 3x3 zero padded
convolutions (optionally strided and grouped), ReLU and LeakyReLU, nearest
and pixel-shuffle upsampling, channel concatenation, addition, scaling and
the mean squared error.

Reductions are performed by numpy in a fixed order so that repeated runs
produce bit-identical results.

"""
from typing import List, Sequence

import numpy as np

from ..errors import GraphError, ShapeError
from .core import Tensor, make_result

#: Kernel size of every convolution of both architectures.
KERNEL = 3


def conv2d(
    input: Tensor, weight: Tensor, bias: Tensor, stride: int = 1, groups: int = 1
) -> Tensor:
    """3x3 cross-correlation with a zero padding of one pixel.

    Parameters
    ----------
    input : Tensor
        (N, Cin, H, W) input.

    weight : Tensor
        (Cout, Cin / groups, 3, 3) kernels.

    bias : Tensor
        (1, Cout, 1, 1) bias.

    stride : {1, 2}
        Stride applied along both spatial dimensions.

    groups : int
        Number of channel groups, group g of the output only reads group g of
        the input.

    Returns
    -------
    output : Tensor
        (N, Cout, floor((H - 1) / stride) + 1, floor((W - 1) / stride) + 1)

    """
    n, c, h, w = input.shape
    cout, cin_g, kh, kw = weight.shape
    if stride not in (1, 2):
        raise ShapeError(f"conv2d stride must be 1 or 2, got {stride}")
    if groups < 1 or c % groups:
        raise ShapeError(f"input channels {c} are not divisible by groups={groups}")
    if cout % groups:
        raise ShapeError(f"output channels {cout} are not divisible by groups={groups}")
    if (kh, kw) != (KERNEL, KERNEL):
        raise ShapeError(f"only 3x3 kernels are supported, got {kh}x{kw}")
    if cin_g != c // groups:
        raise ShapeError(
            f"weight input channels {cin_g} do not match input channels per group "
            f"{c // groups}"
        )
    if bias.shape != (1, cout, 1, 1):
        raise ShapeError(f"bias shape {bias.shape} does not match (1, {cout}, 1, 1)")

    ho = (h + 2 - KERNEL) // stride + 1
    wo = (w + 2 - KERNEL) // stride + 1
    og = cout // groups
    xg = np.pad(input.data, ((0, 0), (0, 0), (1, 1), (1, 1))).reshape(
        n, groups, cin_g, h + 2, w + 2
    )
    wg = weight.data.reshape(groups, og, cin_g, KERNEL, KERNEL)

    def window(ki: int, kj: int) -> tuple:
        return (
            slice(None),
            slice(None),
            slice(None),
            slice(ki, ki + stride * (ho - 1) + 1, stride),
            slice(kj, kj + stride * (wo - 1) + 1, stride),
        )

    out = np.zeros((n, groups, og, ho, wo), dtype=input.dtype)
    for ki in range(KERNEL):
        for kj in range(KERNEL):
            out += np.einsum(
                "goc,ngchw->ngohw", wg[..., ki, kj], xg[window(ki, kj)], optimize=True
            )
    out = out.reshape(n, cout, ho, wo) + bias.data

    def backward(grad: np.ndarray):
        gg = grad.reshape(n, groups, og, ho, wo)
        grad_x = grad_w = None
        if input.requires_grad:
            gx = np.zeros_like(xg)
            for ki in range(KERNEL):
                for kj in range(KERNEL):
                    gx[window(ki, kj)] += np.einsum(
                        "goc,ngohw->ngchw", wg[..., ki, kj], gg, optimize=True
                    )
            grad_x = gx.reshape(n, c, h + 2, w + 2)[:, :, 1:-1, 1:-1]
        if weight.requires_grad:
            gw = np.empty_like(wg)
            for ki in range(KERNEL):
                for kj in range(KERNEL):
                    gw[..., ki, kj] = np.einsum(
                        "ngohw,ngchw->goc", gg, xg[window(ki, kj)], optimize=True
                    )
            grad_w = gw.reshape(weight.shape)
        grad_b = grad.sum(axis=(0, 2, 3)).reshape(bias.shape)
        return grad_x, grad_w, grad_b

    return make_result(out, (input, weight, bias), backward)


def relu(input: Tensor) -> Tensor:
    """Elementwise max(0, x), the gradient at 0 is 0."""
    x = input.data
    out = np.maximum(x, 0)

    def backward(grad: np.ndarray):
        return (grad * (x > 0),)

    return make_result(out, (input,), backward)


def leaky_relu(input: Tensor, alpha: float = 0.1) -> Tensor:
    """x for x >= 0, alpha * x otherwise. The gradient at 0 is alpha."""
    x = input.data
    out = np.where(x >= 0, x, alpha * x).astype(x.dtype, copy=False)

    def backward(grad: np.ndarray):
        return (np.where(x > 0, grad, alpha * grad).astype(grad.dtype, copy=False),)

    return make_result(out, (input,), backward)


def _shuffle(x: np.ndarray, r: int) -> np.ndarray:
    n, c, h, w = x.shape
    co = c // (r * r)
    x = x.reshape(n, co, r, r, h, w).transpose(0, 1, 4, 2, 5, 3)
    return x.reshape(n, co, h * r, w * r)


def _unshuffle(x: np.ndarray, r: int) -> np.ndarray:
    n, c, h, w = x.shape
    ho, wo = h // r, w // r
    x = x.reshape(n, c, ho, r, wo, r).transpose(0, 1, 3, 5, 2, 4)
    return x.reshape(n, c * r * r, ho, wo)


def pixel_shuffle(input: Tensor, r: int = 2) -> Tensor:
    """Rearrange r*r channel groups into an r times finer spatial grid.

    ``out[n, c, h*r + i, w*r + j] = in[n, c*r*r + i*r + j, h, w]``

    """
    c = input.shape[1]
    if c % (r * r):
        raise ShapeError(f"pixel_shuffle needs channels divisible by {r * r}, got {c}")

    def backward(grad: np.ndarray):
        return (_unshuffle(grad, r),)

    return make_result(_shuffle(input.data, r), (input,), backward)


def pixel_unshuffle(input: Tensor, r: int = 2) -> Tensor:
    """Exact inverse of pixel_shuffle."""
    h, w = input.shape[2:]
    if h % r or w % r:
        raise ShapeError(f"pixel_unshuffle needs H and W divisible by {r}, got {h}x{w}")

    def backward(grad: np.ndarray):
        return (_shuffle(grad, r),)

    return make_result(_unshuffle(input.data, r), (input,), backward)


def upsample_nearest_2x(input: Tensor) -> Tensor:
    """Replicate every pixel into a 2x2 block."""
    n, c, h, w = input.shape
    out = np.repeat(np.repeat(input.data, 2, axis=2), 2, axis=3)

    def backward(grad: np.ndarray):
        return (grad.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5)),)

    return make_result(out, (input,), backward)


def concat_channels(inputs: Sequence[Tensor]) -> Tensor:
    """Stack tensors along the channel axis, in argument order."""
    if not inputs:
        raise ShapeError("concat_channels needs at least one input")
    n, _, h, w = inputs[0].shape
    for i, t in enumerate(inputs):
        if (t.shape[0], t.shape[2], t.shape[3]) != (n, h, w):
            raise ShapeError(
                f"input {i} of concat_channels has shape {t.shape}, expected "
                f"({n}, *, {h}, {w})"
            )
    offsets = np.cumsum([0] + [t.shape[1] for t in inputs])
    out = np.concatenate([t.data for t in inputs], axis=1)

    def backward(grad: np.ndarray) -> List[np.ndarray]:
        return [grad[:, offsets[i] : offsets[i + 1]] for i in range(len(inputs))]

    return make_result(out, tuple(inputs), backward)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Elementwise sum of two tensors of identical shape."""
    if a.shape != b.shape:
        raise ShapeError(f"add operands differ in shape: {a.shape} vs {b.shape}")

    def backward(grad: np.ndarray):
        return grad, grad

    return make_result(a.data + b.data, (a, b), backward)


def scale(a: Tensor, factor: float) -> Tensor:
    """Multiply a tensor by a constant."""
    out = (a.data * factor).astype(a.dtype, copy=False)

    def backward(grad: np.ndarray):
        return ((grad * factor).astype(grad.dtype, copy=False),)

    return make_result(out, (a,), backward)


def mse_loss(pred: Tensor, target: Tensor) -> Tensor:
    """Mean of the squared differences, as a (1, 1, 1, 1) tensor.

    The target is a constant: passing a tensor that requires gradients is an
    error, detach it first.

    """
    if pred.shape != target.shape:
        raise ShapeError(
            f"mse_loss operands differ in shape: {pred.shape} vs {target.shape}"
        )
    if target.requires_grad:
        raise GraphError("mse_loss targets must not require gradients, detach them")
    diff = pred.data - target.data.astype(pred.dtype, copy=False)
    count = diff.size
    out = np.mean(np.square(diff)).reshape(1, 1, 1, 1).astype(pred.dtype)

    def backward(grad: np.ndarray):
        return (diff * (2.0 * grad.reshape(()) / count),)

    return make_result(out, (pred,), backward)


def detach(a: Tensor) -> Tensor:
    """Same values, cut from the graph."""
    return Tensor(a.data, tag=a.tag)


def clamp01(a: Tensor) -> Tensor:
    """Clamp into [0, 1]. Inference only, the result carries no graph."""
    return Tensor(np.clip(a.data, 0.0, 1.0), tag=a.tag)
