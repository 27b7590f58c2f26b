# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Pytest fixtures.

"""
import logging
import pathlib

import numpy as np
import pytest

from fitvnet.data.sequence import FrameSequence, save_sequence
from fitvnet.data.synthetic import SynthConfig, synth_sequence
from fitvnet.models.fitvnet import FitvNet, build_fitvnet
from fitvnet.models.spatial import DEC_WIDTH
from fitvnet.utils.rng import make_rng

#: Global variable linked to the --run-slow cmd line option.
RUN_SLOW = False


def pytest_addoption(parser):
    """Add command line options."""
    parser.addoption(
        "--run-slow",
        action="store_true",
        default=False,
        help="Run the tests marked slow (full training runs, full size frames)",
    )


def pytest_configure(config):
    """Turn the --run-slow command line into a global variable."""
    config.addinivalue_line("markers", "slow: mark test taking minutes to run")
    global RUN_SLOW
    RUN_SLOW = bool(config.getoption("--run-slow"))


def pytest_collection_modifyitems(config, items):
    """Skip the slow tests unless --run-slow was passed."""
    if RUN_SLOW:
        return
    skip = pytest.mark.skip(reason="slow test, use --run-slow to run it")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def run_slow() -> bool:
    """Return whether the slow tests were requested."""
    return RUN_SLOW


@pytest.fixture
def logger(caplog):
    """Fixture returning a logger for testing and cleaning handlers afterwards."""
    logger = logging.getLogger("test")
    logger.setLevel(logging.DEBUG)

    yield logger

    logger.handlers = []


@pytest.fixture
def rng() -> np.random.Generator:
    """Generator seeded identically for every test."""
    return make_rng(0, "test")


@pytest.fixture
def synth_config() -> SynthConfig:
    """Seven 64x64 frames of an object moving right by 2 pixels per frame."""
    return SynthConfig(seed=1)


@pytest.fixture
def clean_sequence(synth_config: SynthConfig) -> FrameSequence:
    """Clean synthetic sequence built from synth_config."""
    return synth_sequence(synth_config)


@pytest.fixture
def frames_dir(tmp_path: pathlib.Path, clean_sequence: FrameSequence) -> pathlib.Path:
    """Directory holding the frames of clean_sequence as PNG files."""
    directory = tmp_path / "clean"
    save_sequence(clean_sequence.frames, directory)
    yield directory


@pytest.fixture(scope="session")
def fitvnet_model() -> FitvNet:
    """Freshly initialized network, shared by the tests that do not train it."""
    return build_fitvnet(0)


@pytest.fixture
def identity_fitvnet() -> FitvNet:
    """Network whose denoised frame is its (clamped) noisy centre frame.

    The spatial denoiser forwards its input through the last three layers and
    both fusion blocks are zeroed, reducing them to their residual path.

    """
    net = build_fitvnet(0)
    for weights in net.weight_sets():
        weights.zero_()
    spatial = net.spatial.weights
    for c in range(3):
        spatial.weight("dec_conv1a").value.data[c, DEC_WIDTH + c, 1, 1] = 1.0
        spatial.weight("dec_conv1b").value.data[c, c, 1, 1] = 1.0
        spatial.weight("dec_conv0").value.data[c, c, 1, 1] = 1.0
    return net
