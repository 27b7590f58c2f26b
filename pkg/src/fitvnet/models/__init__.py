# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Spatial denoiser, spatiotemporal blocks and their composition.

"""
from .fitvnet import (
    WINDOW_FRAMES,
    WINDOW_HALF_WIDTH,
    FitvNet,
    build_fitvnet,
    fitvnet_forward,
    stage1_only_forward,
    trace_shapes,
)
from .gradsuite import GradCheckResult, run_grad_suite
from .layers import LayerSpec, ModelWeights, init_weights, param_count
from .spatial import (
    SPATIAL_DIVISOR,
    SpatialDenoiser,
    build_spatial_denoiser,
    spatial_forward,
    spatial_layer_schedule,
)
from .spatiotemporal import (
    BLOCK_DIVISOR,
    SpatioTemporalBlock,
    assemble_block_input,
    build_st_block,
    st_block_forward,
    st_layer_schedule,
)

__all__ = [
    "BLOCK_DIVISOR",
    "SPATIAL_DIVISOR",
    "WINDOW_FRAMES",
    "WINDOW_HALF_WIDTH",
    "FitvNet",
    "GradCheckResult",
    "LayerSpec",
    "ModelWeights",
    "SpatialDenoiser",
    "SpatioTemporalBlock",
    "assemble_block_input",
    "build_fitvnet",
    "build_spatial_denoiser",
    "build_st_block",
    "fitvnet_forward",
    "init_weights",
    "param_count",
    "run_grad_suite",
    "spatial_forward",
    "spatial_layer_schedule",
    "st_block_forward",
    "st_layer_schedule",
    "stage1_only_forward",
    "trace_shapes",
]
