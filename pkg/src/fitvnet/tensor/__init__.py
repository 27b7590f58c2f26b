# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Numerical core: tensors, differentiable operations and the ADAM optimizer.

"""
from .core import DEFAULT_DTYPE, Tensor, is_grad_enabled, no_grad
from .gradcheck import finite_diff_grad_check, relative_error
from .ops import (
    add,
    clamp01,
    concat_channels,
    conv2d,
    detach,
    leaky_relu,
    mse_loss,
    pixel_shuffle,
    pixel_unshuffle,
    relu,
    scale,
    upsample_nearest_2x,
)
from .optim import Adam, OptimizerConfig, Parameter, adam_step

__all__ = [
    "DEFAULT_DTYPE",
    "Adam",
    "OptimizerConfig",
    "Parameter",
    "Tensor",
    "adam_step",
    "add",
    "clamp01",
    "concat_channels",
    "conv2d",
    "detach",
    "finite_diff_grad_check",
    "is_grad_enabled",
    "leaky_relu",
    "mse_loss",
    "no_grad",
    "pixel_shuffle",
    "pixel_unshuffle",
    "relative_error",
    "relu",
    "scale",
    "upsample_nearest_2x",
]
