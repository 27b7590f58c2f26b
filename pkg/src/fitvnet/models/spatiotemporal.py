# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Spatiotemporal fusion block (second stage).

A block reads three consecutive frames, each paired with the noise map, and
predicts a residual added to the middle frame. The first convolution is
grouped: every group of 30 filters only sees one (frame, noise map) slice.
The decoder upsamples by pixel shuffling and adds the encoder outputs of the
same resolution.

"""
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from atom.api import Atom, Typed

from ..errors import ShapeError
from ..tensor.core import DEFAULT_DTYPE, Tensor
from ..tensor.ops import add, concat_channels, pixel_shuffle
from .layers import (
    LayerSpec,
    ModelWeights,
    apply_layer,
    check_divisible,
    init_weights,
)

#: Number of frames read by a block.
BLOCK_FRAMES = 3

#: Total downsampling factor of a block.
BLOCK_DIVISOR = 4


def st_layer_schedule() -> List[LayerSpec]:
    """Resolved layer list of a spatiotemporal block."""
    return [
        LayerSpec("enc_conv1a", 4 * BLOCK_FRAMES, 30 * BLOCK_FRAMES, groups=3),
        LayerSpec("enc_conv1b", 90, 32),
        LayerSpec("enc_conv1c", 32, 64, stride=2),
        LayerSpec("enc_conv2a", 64, 64),
        LayerSpec("enc_conv2b", 64, 64),
        LayerSpec("enc_conv2c", 64, 128, stride=2),
        LayerSpec("enc_conv3a", 128, 128),
        LayerSpec("enc_conv3b", 128, 128),
        LayerSpec("dec_conv3a", 128, 128),
        LayerSpec("dec_conv3b", 128, 128),
        LayerSpec("dec_conv3c", 128, 256),
        LayerSpec("dec_conv2a", 64, 64),
        LayerSpec("dec_conv2b", 64, 64),
        LayerSpec("dec_conv2c", 64, 128),
        LayerSpec("dec_conv1a", 32, 32),
        LayerSpec("dec_conv1b", 32, 3),
    ]


class SpatioTemporalBlock(Atom):
    """Weights of one fusion block."""

    #: Parameters of every layer of the schedule.
    weights = Typed(ModelWeights)

    def parameters(self):
        return self.weights.parameters()


def build_st_block(
    seed: int, prefix: str = "block", dtype: type = DEFAULT_DTYPE
) -> SpatioTemporalBlock:
    """Instantiate a fusion block with seeded initialization."""
    return SpatioTemporalBlock(
        weights=init_weights(prefix, st_layer_schedule(), seed, dtype)
    )


def assemble_block_input(frames: Sequence[Tensor], noise_map: Tensor) -> Tensor:
    """Interleave the frames with the noise map: [f0, m, f1, m, f2, m]."""
    if len(frames) != BLOCK_FRAMES:
        raise ShapeError(
            f"A spatiotemporal block reads {BLOCK_FRAMES} frames, got {len(frames)}"
        )
    reference = frames[0].shape
    for i, f in enumerate(frames):
        if f.shape != reference or f.shape[1] != 3:
            raise ShapeError(
                f"Frame {i} has shape {f.shape}, expected (N, 3, H, W) equal to "
                f"{reference}"
            )
    n, _, h, w = reference
    if noise_map.shape[1] != 1 or noise_map.shape[2:] != (h, w):
        raise ShapeError(
            f"Noise map has shape {noise_map.shape}, expected (N, 1, {h}, {w})"
        )
    if noise_map.shape[0] not in (1, n):
        raise ShapeError(
            f"Noise map batch {noise_map.shape[0]} matches neither 1 nor {n}"
        )
    if noise_map.shape[0] != n:
        noise_map = _broadcast_batch(noise_map, n)
    parts: List[Tensor] = []
    for f in frames:
        parts += [f, noise_map]
    return concat_channels(parts)


def st_block_forward(
    block: SpatioTemporalBlock,
    frames: Sequence[Tensor],
    noise_map: Tensor,
    trace: Optional[Dict[str, Tuple[int, ...]]] = None,
) -> Tensor:
    """Fuse three frames into a denoised version of the middle one.

    Parameters
    ----------
    block : SpatioTemporalBlock
        Weights to use.

    frames : Sequence[Tensor]
        Three (N, 3, H, W) frames ordered in time, H and W divisible by 4.

    noise_map : Tensor
        (N, 1, H, W) or (1, 1, H, W) noise level map.

    trace : dict, optional
        When given, filled with the output shape of every layer.

    """
    x = assemble_block_input(frames, noise_map)
    check_divisible(x.shape, BLOCK_DIVISOR, "A spatiotemporal block")
    weights = block.weights

    def layer(name: str, x: Tensor) -> Tensor:
        out = apply_layer(weights, name, x)
        if trace is not None:
            trace[name] = out.shape
        return out

    x = layer("enc_conv1a", x)
    e1 = layer("enc_conv1b", x)
    x = layer("enc_conv1c", e1)
    x = layer("enc_conv2a", x)
    e2 = layer("enc_conv2b", x)
    x = layer("enc_conv2c", e2)
    x = layer("enc_conv3a", x)
    x = layer("enc_conv3b", x)

    x = layer("dec_conv3a", x)
    x = layer("dec_conv3b", x)
    x = layer("dec_conv3c", x)
    x = add(pixel_shuffle(x, 2), e2)
    if trace is not None:
        trace["dec_plus3"] = x.shape
    x = layer("dec_conv2a", x)
    x = layer("dec_conv2b", x)
    x = layer("dec_conv2c", x)
    x = add(pixel_shuffle(x, 2), e1)
    if trace is not None:
        trace["dec_plus2"] = x.shape
    x = layer("dec_conv1a", x)
    x = layer("dec_conv1b", x)
    return add(x, frames[1])


# =============================================================================
# --- Private API -------------------------------------------------------------
# =============================================================================


def _broadcast_batch(noise_map: Tensor, n: int) -> Tensor:
    """Repeat a constant (1, 1, H, W) map over the batch."""
    if noise_map.requires_grad:
        raise ShapeError("Only constant noise maps can be broadcast over the batch")
    return Tensor(np.repeat(noise_map.data, n, axis=0), tag=noise_map.tag)
