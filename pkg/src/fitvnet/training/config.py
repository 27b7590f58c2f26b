# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Training configuration and state.

"""
from collections import Counter
from typing import List, Optional

from atom.api import Atom, Bool, Enum, Float, Int, List as AList, Tuple, Typed

from ..errors import ConfigError
from ..models.fitvnet import FitvNet
from ..noise.spec import PIXEL_SCALE
from ..tensor.optim import Adam, OptimizerConfig
from ..utils.atom_util import HasConfigAtom

#: Default weight of the first stage loss, per variant.
DEFAULT_ALPHA = {"base": 1.0, "jsn": 1.0, "jsc": 1.0, "unsupervised": 10.0}

#: Default range of the AWGN levels drawn during training, in [0, 1] units.
DEFAULT_SIGMA_RANGE = (5.0 / PIXEL_SCALE, 80.0 / PIXEL_SCALE)


def _range_to_config(obj, member, value):
    return list(value)


def _range_from_config(obj, member, value):
    if len(value) != 2:
        raise ConfigError(f"sigma_range expects two values, got {value}")
    return (float(value[0]), float(value[1]))


def _alpha_to_config(obj, member, value):
    return DEFAULT_ALPHA[obj.variant] if value is None else value


def _alpha_from_config(obj, member, value):
    return float(value)


class TrainConfig(HasConfigAtom):
    """Settings of a training run."""

    #: Objective: L_st alone (base), joint with noisy (jsn) or clean (jsc)
    #: first stage targets, or fully unsupervised.
    variant = Enum("base", "jsn", "jsc", "unsupervised").tag(config=True)

    #: Decay coefficient of the first stage loss, None for the variant default.
    alpha = Typed(float).tag(config=(_alpha_to_config, _alpha_from_config))

    #: Number of epochs.
    epochs = Int(40).tag(config=True)

    #: Number of windows per optimizer step.
    batch_size = Int(16).tag(config=True)

    #: Side of the square training crops.
    patch = Int(96).tag(config=True)

    #: Range of the AWGN standard deviations, in [0, 1] units.
    sigma_range = Tuple(float, default=DEFAULT_SIGMA_RANGE).tag(
        config=(_range_to_config, _range_from_config)
    )

    #: Train on mixed Gaussian and salt-and-pepper noise instead of AWGN.
    mixed = Bool(False).tag(config=True)

    #: Seed of the initialization and of every random draw of the run.
    seed = Int(0).tag(config=True)

    #: Number of batches prepared ahead of the optimizer.
    prefetch = Int(2).tag(config=True)

    #: ADAM hyper-parameters.
    optimizer = Typed(OptimizerConfig, ()).tag(config=True)

    @property
    def effective_alpha(self) -> float:
        return DEFAULT_ALPHA[self.variant] if self.alpha is None else self.alpha

    @property
    def uses_noisy_targets(self) -> bool:
        """Whether a second, independent noisy rendering is needed per frame."""
        return self.variant in ("jsn", "unsupervised")

    def resolve(self) -> "TrainConfig":
        """Replace the defaulted alpha by its value, returns self."""
        self.alpha = self.effective_alpha
        return self

    def validate(self) -> None:
        """Check the settings, raising ConfigError on the first problem."""
        if self.patch <= 0 or self.patch % 32:
            raise ConfigError(f"patch must be a positive multiple of 32: {self.patch}")
        low, high = self.sigma_range
        if not 0.0 <= low <= high <= 1.0:
            raise ConfigError(
                f"sigma_range must satisfy 0 <= low <= high <= 1, got {low}, {high}"
            )
        if self.epochs < 1:
            raise ConfigError(f"epochs must be at least 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be at least 1, got {self.batch_size}")
        if self.effective_alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.effective_alpha}")
        if self.prefetch < 0:
            raise ConfigError(f"prefetch must be non-negative, got {self.prefetch}")
        self.optimizer.validate()


class LossRecord(Atom):
    """Losses of one optimizer step."""

    #: Global step, 1-based.
    step = Int()

    #: Epoch index e the step belongs to.
    epoch = Int()

    #: Weight alpha / e of the first stage loss.
    weight = Float()

    #: First stage loss, None when the variant does not evaluate it.
    l_pd = Typed(float)

    #: Second stage loss.
    l_st = Float()

    #: Optimized objective.
    total = Float()


class TrainState(Atom):
    """Everything that evolves during training."""

    #: Network being trained.
    net = Typed(FitvNet)

    #: Optimizer over every parameter of the network.
    optimizer = Typed(Adam)

    #: 1-based epoch counter e.
    epoch_index = Int(1)

    #: Number of optimizer steps performed.
    iteration = Int()

    #: Losses of every step, in order.
    loss_history = AList(LossRecord)

    #: Number of targets passed to a loss, by provenance tag.
    target_reads = Typed(Counter, ())

    @classmethod
    def create(
        cls, net: FitvNet, config: Optional[OptimizerConfig] = None
    ) -> "TrainState":
        optimizer = Adam(net.parameters(), config or OptimizerConfig())
        return cls(net=net, optimizer=optimizer)

    @property
    def completed_epochs(self) -> int:
        return self.epoch_index - 1

    def losses(self) -> List[float]:
        """Total loss of every step."""
        return [r.total for r in self.loss_history]
