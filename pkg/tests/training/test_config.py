# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the training configuration and state.

"""
import pytest

from fitvnet.errors import ConfigError
from fitvnet.training.config import DEFAULT_SIGMA_RANGE, TrainConfig, TrainState


def test_defaults():
    config = TrainConfig()
    assert config.variant == "base"
    assert (config.epochs, config.batch_size, config.patch) == (40, 16, 96)
    assert config.sigma_range == DEFAULT_SIGMA_RANGE
    assert config.optimizer.learning_rate == 1e-4
    assert config.alpha is None
    config.validate()


@pytest.mark.parametrize(
    "variant, alpha, noisy_targets",
    [
        ("base", 1.0, False),
        ("jsc", 1.0, False),
        ("jsn", 1.0, True),
        ("unsupervised", 10.0, True),
    ],
)
def test_variant_properties(variant, alpha, noisy_targets):
    config = TrainConfig(variant=variant)
    assert config.effective_alpha == alpha
    assert config.uses_noisy_targets is noisy_targets
    assert config.resolve().alpha == alpha
    config.alpha = 3.0
    assert config.effective_alpha == 3.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"patch": 48},
        {"patch": 0},
        {"sigma_range": (0.3, 0.1)},
        {"sigma_range": (0.1, 1.5)},
        {"epochs": 0},
        {"batch_size": 0},
        {"alpha": -1.0},
        {"prefetch": -1},
    ],
)
def test_validation(kwargs):
    with pytest.raises(ConfigError):
        TrainConfig(**kwargs).validate()


def test_optimizer_validation():
    config = TrainConfig()
    config.optimizer.learning_rate = -1.0
    with pytest.raises(ConfigError):
        config.validate()


def test_mapping_conversion():
    config = TrainConfig()
    config.update_members_from_config(
        {
            "variant": "jsn",
            "alpha": 2,
            "sigma_range": [0.1, 0.2],
            "optimizer": {"learning_rate": 0.001},
        }
    )
    assert config.alpha == 2.0
    assert config.sigma_range == (0.1, 0.2)
    assert config.optimizer.learning_rate == 0.001

    mapping = config.config_from_members()
    assert mapping["sigma_range"] == [0.1, 0.2]
    assert mapping["optimizer"]["learning_rate"] == 0.001
    assert TrainConfig(variant="unsupervised").config_from_members()["alpha"] == 10.0

    with pytest.raises(ConfigError):
        config.update_members_from_config({"sigma_range": [0.1]})
    with pytest.raises(ConfigError):
        config.update_members_from_config({"learning_rate": 0.1})


def test_state(fitvnet_model):
    state = TrainState.create(fitvnet_model)
    assert state.epoch_index == 1
    assert state.completed_epochs == 0
    assert len(state.optimizer.parameters) == len(fitvnet_model.parameters())
    assert state.losses() == []
