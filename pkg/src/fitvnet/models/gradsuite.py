# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Finite difference checks of every differentiable operation and model.

All checks run in float64 on small random inputs. The models are checked
with respect to their inputs and to the kernels of their first and last
layers, on a sample of coordinates.

"""
import logging
import time
from typing import Callable, List, Sequence, Tuple

import numpy as np
from atom.api import Atom, Bool, Float, Str

from ..tensor.core import Tensor
from ..tensor.gradcheck import finite_diff_grad_check
from ..tensor.ops import (
    add,
    concat_channels,
    conv2d,
    leaky_relu,
    mse_loss,
    pixel_shuffle,
    pixel_unshuffle,
    relu,
    scale,
    upsample_nearest_2x,
)
from ..tensor.optim import Parameter
from ..utils.rng import make_rng
from .fitvnet import WINDOW_FRAMES, FitvNet, fitvnet_forward
from .spatial import build_spatial_denoiser, spatial_forward
from .spatiotemporal import BLOCK_FRAMES, build_st_block, st_block_forward

logger = logging.getLogger(__name__)

#: Largest accepted relative error.
GRAD_TOLERANCE = 1e-3

#: Central difference step used for the models.
MODEL_PERTURBATION = 1e-6

#: Coordinates checked per model input or parameter.
MODEL_SAMPLES = 4


class GradCheckResult(Atom):
    """Outcome of one check."""

    #: Operation or model checked.
    name = Str()

    #: Maximum relative error.
    error = Float()

    #: Whether the error is below the tolerance.
    passed = Bool()

    #: Duration of the check in seconds.
    seconds = Float()


Case = Tuple[str, Callable[[], float]]


def operation_cases(seed: int = 0) -> List[Case]:
    """Checks of the tensor operations."""
    rng = make_rng(seed, "gradsuite", "ops")

    def array(*shape: int) -> np.ndarray:
        return rng.uniform(-1.0, 1.0, size=shape)

    def kinked(*shape: int) -> np.ndarray:
        # Values stay at least 0.1 away from the kink at 0.
        x = array(*shape)
        return x + 0.1 * np.sign(x)

    def conv_case(cin: int, cout: int, stride: int, groups: int) -> Callable[[], float]:
        weight = Parameter("weight", array(cout, cin // groups, 3, 3))
        bias = Parameter("bias", array(1, cout, 1, 1))
        x = array(1, cin, 9, 9)
        return lambda: finite_diff_grad_check(
            lambda t: conv2d(t, weight.value, bias.value, stride, groups),
            [x],
            params=[weight, bias],
            seed=seed,
        )

    target = Tensor(array(1, 4, 6, 6))
    return [
        ("conv2d", conv_case(4, 6, 1, 1)),
        ("conv2d stride 2", conv_case(4, 6, 2, 1)),
        ("conv2d groups", conv_case(6, 9, 1, 3)),
        ("relu", lambda: finite_diff_grad_check(relu, [kinked(1, 4, 6, 6)])),
        (
            "leaky_relu",
            lambda: finite_diff_grad_check(leaky_relu, [kinked(1, 4, 6, 6)]),
        ),
        (
            "pixel_shuffle",
            lambda: finite_diff_grad_check(pixel_shuffle, [array(1, 12, 4, 4)]),
        ),
        (
            "pixel_unshuffle",
            lambda: finite_diff_grad_check(pixel_unshuffle, [array(1, 3, 8, 8)]),
        ),
        (
            "upsample_nearest_2x",
            lambda: finite_diff_grad_check(upsample_nearest_2x, [array(1, 3, 5, 5)]),
        ),
        (
            "concat_channels",
            lambda: finite_diff_grad_check(
                lambda a, b: concat_channels([a, b]),
                [array(1, 2, 4, 4), array(1, 5, 4, 4)],
            ),
        ),
        (
            "add",
            lambda: finite_diff_grad_check(add, [array(1, 3, 4, 4), array(1, 3, 4, 4)]),
        ),
        (
            "scale",
            lambda: finite_diff_grad_check(
                lambda a: scale(a, -2.5), [array(1, 3, 4, 4)]
            ),
        ),
        (
            "mse_loss",
            lambda: finite_diff_grad_check(
                lambda a: mse_loss(a, target), [array(1, 4, 6, 6)]
            ),
        ),
    ]


def model_cases(seed: int = 0) -> List[Case]:
    """Checks of the spatial denoiser, of a fusion block and of the full model."""
    rng = make_rng(seed, "gradsuite", "models")

    def frames(count: int, size: int) -> List[np.ndarray]:
        return [rng.uniform(0.0, 1.0, size=(1, 3, size, size)) for _ in range(count)]

    def noise_map(size: int) -> np.ndarray:
        return np.full((1, 1, size, size), 0.1)

    def edge_params(model) -> List[Parameter]:
        names = [layer.name for layer in model.weights.layers]
        w = model.weights
        return [w.weight(names[0]), w.weight(names[-1])]

    def check(op, inputs, params) -> float:
        return finite_diff_grad_check(
            op,
            inputs,
            perturbation=MODEL_PERTURBATION,
            params=params,
            samples=MODEL_SAMPLES,
            seed=seed,
        )

    spatial = build_spatial_denoiser(seed, dtype=np.float64)
    block = build_st_block(seed, dtype=np.float64)
    net = FitvNet(
        spatial=spatial,
        block1=build_st_block(seed, "block1", np.float64),
        block2=build_st_block(seed, "block2", np.float64),
    )

    def block_op(*tensors: Tensor) -> Tensor:
        return st_block_forward(block, tensors[:BLOCK_FRAMES], tensors[BLOCK_FRAMES])

    def net_op(*tensors: Tensor) -> Tensor:
        return fitvnet_forward(net, tensors[:WINDOW_FRAMES], tensors[WINDOW_FRAMES])[0]

    return [
        (
            "spatial denoiser",
            lambda: check(
                lambda x: spatial_forward(spatial, x),
                frames(1, 32),
                edge_params(spatial),
            ),
        ),
        (
            "spatio-temporal block",
            lambda: check(
                block_op, frames(BLOCK_FRAMES, 16) + [noise_map(16)], edge_params(block)
            ),
        ),
        (
            "fitvnet",
            lambda: check(net_op, frames(WINDOW_FRAMES, 32) + [noise_map(32)], []),
        ),
    ]


def run_grad_suite(
    seed: int = 0,
    tolerance: float = GRAD_TOLERANCE,
    cases: Sequence[Case] = (),
) -> List[GradCheckResult]:
    """Run the checks, by default those of the operations and of the models."""
    cases = list(cases) or operation_cases(seed) + model_cases(seed)
    results = []
    for name, case in cases:
        start = time.perf_counter()
        error = case()
        result = GradCheckResult(
            name=name,
            error=error,
            passed=bool(error < tolerance),
            seconds=time.perf_counter() - start,
        )
        log = logger.info if result.passed else logger.error
        log("%-22s max relative error %.3e (%.2f s)", name, error, result.seconds)
        results.append(result)
    return results