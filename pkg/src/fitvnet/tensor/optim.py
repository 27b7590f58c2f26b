# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Trainable parameters and the ADAM optimizer.

"""
import logging
from typing import Iterable, List

import numpy as np
from atom.api import Atom, Float, Int, List as AList, Str, Typed

from ..errors import ConfigError, GraphError
from ..utils.atom_util import HasConfigAtom
from .core import Tensor

logger = logging.getLogger(__name__)


class OptimizerConfig(HasConfigAtom):
    """ADAM hyper-parameters, the defaults are the usual ADAM defaults."""

    #: Step size.
    learning_rate = Float(1e-4).tag(config=True)

    #: Decay rate of the first moment estimate.
    beta1 = Float(0.9).tag(config=True)

    #: Decay rate of the second moment estimate.
    beta2 = Float(0.999).tag(config=True)

    #: Term added to the denominator for numerical stability.
    epsilon = Float(1e-8).tag(config=True)

    def validate(self) -> None:
        """Check the ranges of the hyper-parameters."""
        if self.learning_rate <= 0:
            raise ConfigError(
                f"learning_rate must be positive, got {self.learning_rate}"
            )
        for name in ("beta1", "beta2"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise ConfigError(f"{name} must lie in (0, 1), got {value}")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")


class Parameter(Atom):
    """A named trainable tensor with its ADAM state."""

    #: Unique identifier, e.g. "block1.enc_conv1a.weight".
    name = Str()

    #: Current value, a leaf tensor requiring gradients.
    value = Typed(Tensor)

    #: First moment estimate.
    adam_m = Typed(np.ndarray)

    #: Second moment estimate.
    adam_v = Typed(np.ndarray)

    #: Number of optimizer steps applied to this parameter.
    step_count = Int()

    def __init__(self, name: str, data: np.ndarray) -> None:
        value = Tensor(data, requires_grad=True, tag=name)
        super().__init__(
            name=name,
            value=value,
            adam_m=np.zeros_like(value.data),
            adam_v=np.zeros_like(value.data),
        )

    @property
    def shape(self):
        return self.value.shape

    @property
    def size(self) -> int:
        return int(self.value.data.size)

    def reset_state(self) -> None:
        """Zero the moments and the step counter."""
        self.adam_m = np.zeros_like(self.value.data)
        self.adam_v = np.zeros_like(self.value.data)
        self.step_count = 0


def adam_step(param: Parameter, config: OptimizerConfig) -> Parameter:
    """Apply one bias corrected ADAM update to a parameter, in place.

    The gradient is consumed: it is cleared once the update is applied.

    Raises
    ------
    GraphError
        If the parameter has no gradient.

    """
    grad = param.value.grad
    if grad is None:
        raise GraphError(f"Parameter {param.name} has no gradient to apply")

    dtype = param.value.dtype
    b1, b2 = config.beta1, config.beta2
    t = param.step_count + 1
    m = (b1 * param.adam_m + (1.0 - b1) * grad).astype(dtype, copy=False)
    v = (b2 * param.adam_v + (1.0 - b2) * np.square(grad)).astype(dtype, copy=False)
    m_hat = m / (1.0 - b1**t)
    v_hat = v / (1.0 - b2**t)
    update = config.learning_rate * m_hat / (np.sqrt(v_hat) + config.epsilon)

    param.value.data = (param.value.data - update).astype(dtype, copy=False)
    param.adam_m = m
    param.adam_v = v
    param.step_count = t
    param.value.grad = None
    return param


class Adam(Atom):
    """ADAM over a fixed list of parameters."""

    #: Hyper-parameters shared by all parameters.
    config = Typed(OptimizerConfig, ())

    #: Parameters updated by step.
    parameters = AList(Parameter)

    def __init__(
        self, parameters: Iterable[Parameter], config: OptimizerConfig
    ) -> None:
        super().__init__(parameters=list(parameters), config=config)

    def step(self) -> List[str]:
        """Update every parameter that received a gradient.

        Returns
        -------
        updated : list[str]
            Names of the updated parameters.

        """
        updated = []
        for param in self.parameters:
            if param.value.grad is None:
                continue
            adam_step(param, self.config)
            updated.append(param.name)
        logger.debug(
            "ADAM step updated %d/%d parameters", len(updated), len(self.parameters)
        )
        return updated

    def zero_grad(self) -> None:
        """Drop the gradients of all parameters."""
        for param in self.parameters:
            param.value.zero_grad()
