# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Synthetic clean sequences: a textured square moving over a textured canvas.

The object is rigid: its texture is pulled towards the mean level of the
background, ``level + contrast * (texture - level)``, so that its pixels are
identical in every frame. A contrast of 0 leaves the background untouched and
a contrast of 1 draws the raw texture.

"""
from typing import List, Tuple

import numpy as np
from atom.api import Float, Int, Tuple as ATuple
from scipy import ndimage

from ..errors import ShapeError
from ..tensor.core import DEFAULT_DTYPE
from ..utils.atom_util import HasConfigAtom
from ..utils.rng import make_rng
from .sequence import FrameSequence


def _velocity_to_config(obj, member, value):
    return list(value)


def _velocity_from_config(obj, member, value):
    return tuple(int(v) for v in value)


class SynthConfig(HasConfigAtom):
    """Geometry and appearance of a synthetic sequence."""

    #: Side of the square object, in pixels.
    object_size = Int(16).tag(config=True)

    #: Displacement (vx, vy) of the object between two frames, in pixels.
    velocity = ATuple(int, default=(2, 0)).tag(
        config=(_velocity_to_config, _velocity_from_config)
    )

    #: Scale of the gap between the object texture and the background level.
    contrast = Float(0.5).tag(config=True)

    #: Number of frames.
    frames = Int(7).tag(config=True)

    #: Frame height.
    height = Int(64).tag(config=True)

    #: Frame width.
    width = Int(64).tag(config=True)

    #: Seed of the textures and of the starting position.
    seed = Int().tag(config=True)


def object_track(config: SynthConfig) -> List[Tuple[int, int]]:
    """(top, left) corner of the object in every frame.

    Raises
    ------
    ShapeError
        If no starting position keeps the object inside the canvas.

    """
    if config.frames < 1 or config.object_size < 1:
        raise ShapeError("A synthetic sequence needs at least one frame and pixel")
    if not 0.0 <= config.contrast <= 1.0:
        raise ShapeError(f"contrast must lie in [0, 1], got {config.contrast}")
    vx, vy = config.velocity
    travel_x, travel_y = vx * (config.frames - 1), vy * (config.frames - 1)
    size = config.object_size
    left_range = (max(0, -travel_x), config.width - size - max(0, travel_x))
    top_range = (max(0, -travel_y), config.height - size - max(0, travel_y))
    if left_range[0] > left_range[1] or top_range[0] > top_range[1]:
        raise ShapeError(
            f"A {size} px object moving by {config.velocity} px per frame leaves "
            f"the {config.height}x{config.width} canvas within {config.frames} frames"
        )
    rng = make_rng(config.seed, "synth", "origin")
    top = int(rng.integers(top_range[0], top_range[1] + 1))
    left = int(rng.integers(left_range[0], left_range[1] + 1))
    return [(top + vy * t, left + vx * t) for t in range(config.frames)]


def synth_sequence(config: SynthConfig) -> FrameSequence:
    """Render the clean frames described by a configuration."""
    track = object_track(config)
    size = config.object_size
    background = _texture(config.seed, "background", config.height, config.width, 4.0)
    texture = _texture(config.seed, "object", size, size, 1.0)
    level = background.mean(axis=(1, 2), keepdims=True)
    sprite = level + config.contrast * (texture - level)

    frames = []
    for top, left in track:
        frame = background.copy()
        if config.contrast > 0:
            frame[:, top : top + size, left : left + size] = sprite
        frames.append(frame.astype(DEFAULT_DTYPE))
    return FrameSequence(frames, "synthetic")


# =============================================================================
# --- Private API -------------------------------------------------------------
# =============================================================================


def _texture(seed: int, name: str, h: int, w: int, smoothing: float) -> np.ndarray:
    """Smooth random (3, h, w) texture stretched over [0.1, 0.9] per channel."""
    rng = make_rng(seed, "synth", name)
    raw = ndimage.gaussian_filter(
        rng.random((3, h, w)), sigma=(0.0, smoothing, smoothing), mode="wrap"
    )
    low = raw.min(axis=(1, 2), keepdims=True)
    high = raw.max(axis=(1, 2), keepdims=True)
    span = np.where(high > low, high - low, 1.0)
    return 0.1 + 0.8 * (raw - low) / span
