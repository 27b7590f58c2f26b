# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Two-stage composition: spatial denoising of every frame, then fusion.

The five frames of a window are first denoised independently by the shared
spatial denoiser. The first fusion block is applied to the triplets
(1, 2, 3), (2, 3, 4) and (3, 4, 5) of these outputs with the same weights,
and the second block fuses the three results into the centre frame.

"""
import logging
from collections import OrderedDict
from typing import Dict, List, Sequence, Tuple

import numpy as np
from atom.api import Atom, Constant, Typed

from ..errors import ShapeError
from ..tensor.core import DEFAULT_DTYPE, Tensor, no_grad
from ..tensor.ops import clamp01
from ..tensor.optim import Parameter
from .layers import ModelWeights
from .spatial import (
    SPATIAL_DIVISOR,
    SpatialDenoiser,
    build_spatial_denoiser,
    spatial_forward,
)
from .spatiotemporal import SpatioTemporalBlock, build_st_block, st_block_forward

logger = logging.getLogger(__name__)

#: Half width K of the temporal window.
WINDOW_HALF_WIDTH = 2

#: Number of frames 2K + 1 of a window.
WINDOW_FRAMES = 2 * WINDOW_HALF_WIDTH + 1


class FitvNet(Atom):
    """The three weight sets of the full denoiser."""

    #: First stage, shared across the five frames.
    spatial = Typed(SpatialDenoiser)

    #: Fusion block shared across the three triplets.
    block1 = Typed(SpatioTemporalBlock)

    #: Fusion block producing the centre frame.
    block2 = Typed(SpatioTemporalBlock)

    #: Half width of the temporal window.
    k = Constant(WINDOW_HALF_WIDTH)

    def weight_sets(self) -> List[ModelWeights]:
        return [self.spatial.weights, self.block1.weights, self.block2.weights]

    def parameters(self) -> List[Parameter]:
        """Every trainable parameter, spatial first."""
        return [p for weights in self.weight_sets() for p in weights]

    def named_arrays(self) -> "OrderedDict[str, np.ndarray]":
        arrays: "OrderedDict[str, np.ndarray]" = OrderedDict()
        for weights in self.weight_sets():
            arrays.update(weights.named_arrays())
        return arrays

    def zero_grad(self) -> None:
        for weights in self.weight_sets():
            weights.zero_grad()


def build_fitvnet(seed: int, dtype: type = DEFAULT_DTYPE) -> FitvNet:
    """Instantiate the full denoiser, every weight set keyed on the same seed."""
    net = FitvNet(
        spatial=build_spatial_denoiser(seed, "spatial", dtype),
        block1=build_st_block(seed, "block1", dtype),
        block2=build_st_block(seed, "block2", dtype),
    )
    logger.info(
        "Built FITVNet (seed %d): %d parameters",
        seed,
        sum(p.size for p in net.parameters()),
    )
    return net


def fitvnet_forward(
    net: FitvNet,
    frames: Sequence[Tensor],
    noise_map: Tensor,
    inference: bool = False,
) -> Tuple[Tensor, List[Tensor]]:
    """Denoise the centre frame of a five frame window.

    Parameters
    ----------
    net : FitvNet
        Weights to use.

    frames : Sequence[Tensor]
        Five (N, 3, H, W) noisy frames, H and W divisible by 32.

    noise_map : Tensor
        Noise level map shared by both fusion stages.

    inference : bool, optional
        Evaluate without graph. The centre output and the returned first stage
        outputs are clamped to [0, 1], the fusion blocks still read the
        unclamped first stage outputs.

    Returns
    -------
    center : Tensor
        Denoised centre frame.

    stage1 : list[Tensor]
        Outputs of the spatial denoiser for the five frames.

    """
    if len(frames) != WINDOW_FRAMES:
        raise ShapeError(f"FITVNet reads {WINDOW_FRAMES} frames, got {len(frames)}")
    if inference:
        with no_grad():
            center, stage1 = _forward(net, frames, noise_map)
        return clamp01(center), [clamp01(s) for s in stage1]
    return _forward(net, frames, noise_map)


def stage1_only_forward(net: FitvNet, frames: Sequence[Tensor]) -> Tensor:
    """Inference through the spatial denoiser alone, on the centre frame."""
    if len(frames) != WINDOW_FRAMES:
        raise ShapeError(f"FITVNet reads {WINDOW_FRAMES} frames, got {len(frames)}")
    return spatial_forward(net.spatial, frames[WINDOW_HALF_WIDTH], inference=True)


def trace_shapes(
    model: Atom, shape: Tuple[int, int, int, int]
) -> Dict[str, Tuple[int, ...]]:
    """Output shape of every layer for an input of the given shape.

    ``shape`` is the shape of one frame. Supported models are
    SpatialDenoiser and SpatioTemporalBlock.

    """
    trace: Dict[str, Tuple[int, ...]] = {}
    frame = Tensor(np.zeros(shape, dtype=DEFAULT_DTYPE))
    with no_grad():
        if isinstance(model, SpatialDenoiser):
            spatial_forward(model, frame, trace=trace)
        elif isinstance(model, SpatioTemporalBlock):
            n, _, h, w = shape
            noise_map = Tensor(np.zeros((n, 1, h, w), dtype=DEFAULT_DTYPE))
            st_block_forward(model, [frame] * 3, noise_map, trace=trace)
        else:
            raise TypeError(f"Cannot trace a {type(model).__name__}")
    return trace


# =============================================================================
# --- Private API -------------------------------------------------------------
# =============================================================================


def _forward(
    net: FitvNet, frames: Sequence[Tensor], noise_map: Tensor
) -> Tuple[Tensor, List[Tensor]]:
    shape = frames[0].shape
    for i, f in enumerate(frames):
        if f.shape != shape:
            raise ShapeError(f"Frame {i} has shape {f.shape}, frame 0 has {shape}")
    if shape[2] % SPATIAL_DIVISOR or shape[3] % SPATIAL_DIVISOR:
        raise ShapeError(
            f"FITVNet requires H and W divisible by {SPATIAL_DIVISOR}, "
            f"got {shape[2]}x{shape[3]}"
        )

    stage1 = [spatial_forward(net.spatial, f) for f in frames]
    fused = [
        st_block_forward(net.block1, stage1[i : i + 3], noise_map) for i in range(3)
    ]
    center = st_block_forward(net.block2, fused, noise_map)
    return center, stage1
