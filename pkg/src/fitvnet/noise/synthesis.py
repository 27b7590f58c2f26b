# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Noise rendering.

Every generator is a pure function of its input frames and of the seed: the
stream used for frame i is keyed by (seed, generator, i). Gaussian noise is
never clamped, impulse noise hits whole RGB pixels whose locations only
depend on the seed and on the frame size.

"""
import logging

import numpy as np

from ..data.sequence import FrameSequence
from ..errors import NoiseSpecError
from ..tensor.core import DEFAULT_DTYPE, Tensor
from ..utils.rng import derive_seed, make_rng
from .spec import MIXED_SIGMA, MIXED_SP_RATIO, NoiseSpec

logger = logging.getLogger(__name__)


def add_awgn(frames: FrameSequence, sigma: float, seed: int) -> FrameSequence:
    """Add zero mean Gaussian noise of standard deviation sigma to every value."""
    if sigma < 0:
        raise NoiseSpecError(f"sigma must be non-negative, got {sigma}")
    spec = NoiseSpec.awgn(sigma, seed)
    if sigma == 0:
        return frames.derive([f.copy() for f in frames.frames], spec)

    noisy = []
    for i, frame in enumerate(frames.frames):
        rng = make_rng(seed, "awgn", i)
        noise = rng.standard_normal(frame.shape) * sigma
        noisy.append((frame + noise).astype(frame.dtype))
    return frames.derive(noisy, spec)


def salt_pepper_mask(
    h: int, w: int, ratio: float, seed: int, index: int = 0
) -> "tuple[np.ndarray, np.ndarray]":
    """Flat pixel indices hit by impulse noise and the value (0 or 1) they take.

    Exactly round(ratio * H * W) distinct pixels are drawn.

    """
    if not 0.0 <= ratio <= 1.0:
        raise NoiseSpecError(f"The salt-and-pepper ratio must lie in [0, 1]: {ratio}")
    rng = make_rng(seed, "salt_pepper", index)
    count = int(round(ratio * h * w))
    locations = rng.choice(h * w, size=count, replace=False)
    values = rng.integers(0, 2, size=count).astype(DEFAULT_DTYPE)
    return locations, values


def add_salt_pepper(frames: FrameSequence, ratio: float, seed: int) -> FrameSequence:
    """Set a random fraction of the pixels of every frame to black or white."""
    if not 0.0 <= ratio <= 1.0:
        raise NoiseSpecError(f"The salt-and-pepper ratio must lie in [0, 1]: {ratio}")
    h, w = frames.size
    noisy = []
    for i, frame in enumerate(frames.frames):
        locations, values = salt_pepper_mask(h, w, ratio, seed, i)
        out = frame.copy().reshape(3, h * w)
        out[:, locations] = values
        noisy.append(out.reshape(3, h, w))
    spec = NoiseSpec(kind="mixed", sigma=0.0, sp_ratio=ratio, seed=seed)
    if frames.applied_noise is not None:
        spec.sigma = frames.applied_noise.sigma
    return frames.derive(noisy, spec)


def add_mixed(
    frames: FrameSequence,
    seed: int,
    sigma: float = MIXED_SIGMA,
    ratio: float = MIXED_SP_RATIO,
) -> FrameSequence:
    """Gaussian noise followed by salt-and-pepper noise.

    Both components draw from sub-seeds of seed, and the impulses are applied
    last so that corrupted pixels are exactly 0 or 1.

    """
    spec = NoiseSpec.mixed(seed, sigma, ratio)
    gaussian = add_awgn(frames, sigma, mixed_component_seed(seed, "awgn"))
    noisy = add_salt_pepper(gaussian, ratio, mixed_component_seed(seed, "salt_pepper"))
    return noisy.derive(noisy.frames, spec)


def mixed_component_seed(seed: int, component: str) -> int:
    """Sub-seed of one component of the mixed noise."""
    return derive_seed(seed, "mixed", component)


def render_noise(frames: FrameSequence, spec: NoiseSpec) -> FrameSequence:
    """Apply the noise described by a spec."""
    spec.validate()
    logger.debug("Rendering %s on %d frames", spec.describe(), len(frames))
    if spec.kind == "awgn":
        return add_awgn(frames, spec.sigma, spec.seed)
    return add_mixed(frames, spec.seed, spec.sigma, spec.sp_ratio)


def make_noise_map(
    spec: NoiseSpec, h: int, w: int, dtype: type = DEFAULT_DTYPE
) -> Tensor:
    """(1, 1, h, w) map filled with the standard deviation of the spec."""
    return Tensor(np.full((1, 1, h, w), spec.sigma, dtype=dtype), tag="noise_map")


def independent_spec(spec: NoiseSpec, stream: str = "target") -> NoiseSpec:
    """Same noise process drawn from an independent sub-seed."""
    seed = derive_seed(spec.seed, "independent", stream)
    if seed == spec.seed:
        seed = derive_seed(seed, "independent", stream)
    return NoiseSpec(
        kind=spec.kind, sigma=spec.sigma, sp_ratio=spec.sp_ratio, seed=seed
    )
