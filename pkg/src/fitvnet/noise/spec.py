# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Declarative description of a noise process.

"""
from typing import Any, Dict, Mapping, Optional

from atom.api import Enum, Float, Int

from ..errors import NoiseSpecError
from ..utils.atom_util import HasConfigAtom

#: Scale of the 8-bit values on which noise levels are usually quoted.
PIXEL_SCALE = 255.0

#: Standard deviation of the Gaussian part of the mixed noise, in [0, 1] units.
MIXED_SIGMA = 25.5 / PIXEL_SCALE

#: Fraction of pixels hit by the impulse part of the mixed noise.
MIXED_SP_RATIO = 0.10


class NoiseSpec(HasConfigAtom):
    """Noise kind, levels and seed. All levels are in [0, 1] units."""

    #: Additive white Gaussian noise alone, or Gaussian plus salt-and-pepper.
    kind = Enum("awgn", "mixed").tag(config=True)

    #: Standard deviation of the Gaussian noise.
    sigma = Float().tag(config=True)

    #: Fraction of pixels set to 0 or 1, always 0 for awgn.
    sp_ratio = Float().tag(config=True)

    #: Seed of the random streams, a non-negative 64 bits integer.
    seed = Int().tag(config=True)

    @classmethod
    def awgn(cls, sigma: float, seed: int) -> "NoiseSpec":
        spec = cls(kind="awgn", sigma=sigma, sp_ratio=0.0, seed=seed)
        spec.validate()
        return spec

    @classmethod
    def mixed(
        cls,
        seed: int,
        sigma: float = MIXED_SIGMA,
        sp_ratio: float = MIXED_SP_RATIO,
    ) -> "NoiseSpec":
        spec = cls(kind="mixed", sigma=sigma, sp_ratio=sp_ratio, seed=seed)
        spec.validate()
        return spec

    @classmethod
    def from_pixel_scale(
        cls,
        kind: str,
        sigma255: Optional[float] = None,
        sp_ratio: Optional[float] = None,
        seed: int = 0,
    ) -> "NoiseSpec":
        """Build a spec from a sigma quoted on the 0-255 scale.

        Missing values of a mixed spec take the mixed defaults, a missing
        sigma of an awgn spec is an error.

        """
        if kind == "mixed":
            sigma = MIXED_SIGMA if sigma255 is None else sigma255 / PIXEL_SCALE
            ratio = MIXED_SP_RATIO if sp_ratio is None else sp_ratio
            return cls.mixed(seed, sigma, ratio)
        if kind == "awgn":
            if sigma255 is None:
                raise NoiseSpecError("awgn noise requires a sigma")
            if sp_ratio:
                raise NoiseSpecError("awgn noise does not take a salt-and-pepper ratio")
            return cls.awgn(sigma255 / PIXEL_SCALE, seed)
        raise NoiseSpecError(f"Unknown noise kind {kind!r}, expected awgn or mixed")

    def validate(self) -> None:
        """Check the ranges of the levels and their consistency with the kind."""
        if not 0.0 <= self.sigma <= 1.0:
            raise NoiseSpecError(f"sigma must lie in [0, 1], got {self.sigma}")
        if not 0.0 <= self.sp_ratio <= 1.0:
            raise NoiseSpecError(f"sp_ratio must lie in [0, 1], got {self.sp_ratio}")
        if self.kind == "awgn" and self.sp_ratio != 0.0:
            raise NoiseSpecError("awgn noise must have a zero sp_ratio")
        if not 0 <= self.seed < 2**64:
            raise NoiseSpecError(
                f"seed must be a 64 bits unsigned integer, got {self.seed}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.config_from_members())

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "NoiseSpec":
        spec = cls()
        spec.update_members_from_config(dict(data))
        spec.validate()
        return spec

    def describe(self) -> str:
        """Short human readable summary, levels on the 0-255 scale."""
        text = f"{self.kind} sigma={self.sigma * PIXEL_SCALE:g}/255"
        if self.kind == "mixed":
            text += f" sp={self.sp_ratio:g}"
        return f"{text} seed={self.seed}"
