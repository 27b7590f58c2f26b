# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the noise description.

"""
import pytest

from fitvnet.errors import ConfigError, NoiseSpecError
from fitvnet.noise.spec import MIXED_SIGMA, MIXED_SP_RATIO, NoiseSpec


def test_awgn_and_mixed_constructors():
    spec = NoiseSpec.awgn(0.1, 3)
    assert (spec.kind, spec.sigma, spec.sp_ratio, spec.seed) == ("awgn", 0.1, 0.0, 3)
    mixed = NoiseSpec.mixed(4)
    assert mixed.sigma == pytest.approx(0.1)
    assert mixed.sp_ratio == MIXED_SP_RATIO


@pytest.mark.parametrize(
    "kwargs",
    [
        {"sigma": -0.1},
        {"sigma": 1.5},
        {"sp_ratio": 0.1},
        {"kind": "mixed", "sp_ratio": 2.0},
        {"seed": -1},
        {"seed": 2**64},
    ],
)
def test_validation(kwargs):
    with pytest.raises(NoiseSpecError):
        NoiseSpec(**kwargs).validate()


def test_from_pixel_scale():
    spec = NoiseSpec.from_pixel_scale("awgn", 25.5, seed=2)
    assert spec.sigma == pytest.approx(0.1)
    assert spec.seed == 2

    mixed = NoiseSpec.from_pixel_scale("mixed")
    assert mixed.sigma == MIXED_SIGMA
    assert mixed.sp_ratio == MIXED_SP_RATIO
    assert NoiseSpec.from_pixel_scale("mixed", 51.0, 0.2).sp_ratio == 0.2

    with pytest.raises(NoiseSpecError):
        NoiseSpec.from_pixel_scale("awgn")
    with pytest.raises(NoiseSpecError):
        NoiseSpec.from_pixel_scale("awgn", 10.0, 0.1)
    with pytest.raises(NoiseSpecError):
        NoiseSpec.from_pixel_scale("poisson", 10.0)


def test_dict_conversion():
    spec = NoiseSpec.mixed(7, sigma=0.05, sp_ratio=0.2)
    data = spec.to_dict()
    assert data == {"kind": "mixed", "sigma": 0.05, "sp_ratio": 0.2, "seed": 7}
    assert NoiseSpec.from_dict(data).to_dict() == data

    with pytest.raises(NoiseSpecError):
        NoiseSpec.from_dict({"kind": "awgn", "sigma": 3.0})
    with pytest.raises(ConfigError):
        NoiseSpec.from_dict({"kind": "awgn", "level": 3.0})


def test_describe():
    assert NoiseSpec.awgn(25 / 255, 1).describe() == "awgn sigma=25/255 seed=1"
    assert NoiseSpec.mixed(0).describe() == "mixed sigma=25.5/255 sp=0.1 seed=0"
