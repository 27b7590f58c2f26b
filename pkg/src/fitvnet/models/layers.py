# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Layer schedules and the parameter containers built from them.

Both architectures are described by an ordered list of LayerSpec, each one a
3x3 convolution followed by an activation. The builders turn a schedule into
a ModelWeights holding one weight and one bias Parameter per layer.

"""
import logging
from collections import OrderedDict
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from atom.api import Atom, Enum, Int, List as AList, Str, Typed

from ..errors import CheckpointError, ShapeError
from ..tensor.core import DEFAULT_DTYPE, Tensor
from ..tensor.ops import KERNEL, conv2d, leaky_relu, relu
from ..tensor.optim import Parameter
from ..utils.rng import make_rng

logger = logging.getLogger(__name__)

#: Negative slope of the LeakyReLU ending the spatial denoiser.
LEAKY_SLOPE = 0.1


class LayerSpec(Atom):
    """One 3x3 convolution of a resolved layer schedule."""

    #: Layer name, lower case version of the architecture tables names.
    name = Str()

    #: Number of input channels.
    cin = Int()

    #: Number of output channels.
    cout = Int()

    #: Spatial stride, 1 or 2.
    stride = Int(1)

    #: Number of channel groups.
    groups = Int(1)

    #: Activation applied to the convolution output.
    activation = Enum("relu", "leaky_relu", "linear")

    def __init__(
        self,
        name: str,
        cin: int,
        cout: int,
        stride: int = 1,
        groups: int = 1,
        activation: str = "relu",
    ) -> None:
        if cin % groups or cout % groups:
            raise ShapeError(
                f"Layer {name}: channels {cin}->{cout} are not divisible by "
                f"groups={groups}"
            )
        super().__init__(
            name=name,
            cin=cin,
            cout=cout,
            stride=stride,
            groups=groups,
            activation=activation,
        )

    @property
    def weight_shape(self) -> Tuple[int, int, int, int]:
        return (self.cout, self.cin // self.groups, KERNEL, KERNEL)

    @property
    def bias_shape(self) -> Tuple[int, int, int, int]:
        return (1, self.cout, 1, 1)

    def param_count(self) -> int:
        """Cout * (Cin / groups * 9 + 1)"""
        return self.cout * (self.cin // self.groups * KERNEL * KERNEL + 1)

    def as_tuple(self) -> tuple:
        return (
            self.name,
            self.cin,
            self.cout,
            self.stride,
            self.groups,
            self.activation,
        )


class ModelWeights(Atom):
    """Named, ordered collection of the parameters of one architecture instance.

    Parameters are named ``<prefix>.<layer>.weight`` and
    ``<prefix>.<layer>.bias`` and iterate in layer order.

    """

    #: Prefix shared by every parameter name ("spatial", "block1", ...).
    prefix = Str()

    #: Layer schedule the parameters were built from.
    layers = AList(LayerSpec)

    def __init__(
        self,
        prefix: str,
        layers: Sequence[LayerSpec],
        parameters: Mapping[str, Parameter],
    ) -> None:
        super().__init__(prefix=prefix, layers=list(layers))
        self._params = OrderedDict(parameters)

    def parameters(self) -> List[Parameter]:
        """Parameters in layer order, weight before bias."""
        return list(self._params.values())

    def names(self) -> List[str]:
        return list(self._params)

    def __len__(self) -> int:
        return len(self._params)

    def __iter__(self) -> Iterator[Parameter]:
        return iter(self._params.values())

    def __getitem__(self, name: str) -> Parameter:
        return self._params[name]

    def layer(self, name: str) -> LayerSpec:
        """Access the spec of a layer by name."""
        for spec in self.layers:
            if spec.name == name:
                return spec
        raise KeyError(f"{self.prefix} has no layer {name}")

    def weight(self, layer: str) -> Parameter:
        return self._params[f"{self.prefix}.{layer}.weight"]

    def bias(self, layer: str) -> Parameter:
        return self._params[f"{self.prefix}.{layer}.bias"]

    def named_arrays(self) -> "OrderedDict[str, np.ndarray]":
        """Values of the parameters by name, in layer order."""
        return OrderedDict((name, p.value.data) for name, p in self._params.items())

    def expected_shapes(self) -> Dict[str, Tuple[int, ...]]:
        return {name: p.shape for name, p in self._params.items()}

    def load_arrays(self, arrays: Mapping[str, np.ndarray]) -> None:
        """Replace every parameter value by the array of the same name.

        All names and shapes are validated before anything is modified.

        Raises
        ------
        CheckpointError
            If arrays are missing or do not have the expected shapes.

        """
        missing = [name for name in self._params if name not in arrays]
        if missing:
            raise CheckpointError(
                f"Missing tensors for {self.prefix}: {', '.join(missing)}"
            )
        for name, param in self._params.items():
            shape = tuple(np.shape(arrays[name]))
            if shape != param.shape:
                raise CheckpointError(
                    f"Tensor {name} has shape {shape}, expected {param.shape}"
                )
        for name, param in self._params.items():
            param.value.data = np.array(arrays[name], dtype=param.value.dtype)
            param.value.grad = None

    def zero_(self) -> "ModelWeights":
        """Set every parameter to zero, in place."""
        for param in self._params.values():
            param.value.data = np.zeros_like(param.value.data)
        return self

    def zero_grad(self) -> None:
        for param in self._params.values():
            param.value.zero_grad()

    # =========================================================================
    # --- Private API ---------------------------------------------------------
    # =========================================================================

    #: Parameters by name.
    _params = Typed(OrderedDict, ())


def param_count(weights: Optional[Iterable[Parameter]]) -> int:
    """Total number of scalar parameters."""
    if weights is None:
        return 0
    return sum(p.size for p in weights)


def init_weights(
    prefix: str,
    layers: Sequence[LayerSpec],
    seed: int,
    dtype: type = DEFAULT_DTYPE,
) -> ModelWeights:
    """Build the parameters of a schedule with the seeded fan-in initialization.

    Weights are drawn uniformly in +/- sqrt(1 / (Cin / groups * 9)) from a
    stream keyed by (seed, prefix, layer name), biases start at zero.

    """
    names = set()
    params: "OrderedDict[str, Parameter]" = OrderedDict()
    for spec in layers:
        if spec.name in names:
            raise ValueError(f"Duplicate layer name {spec.name} in {prefix}")
        names.add(spec.name)
        fan_in = spec.weight_shape[1] * KERNEL * KERNEL
        bound = np.sqrt(1.0 / fan_in)
        rng = make_rng(seed, prefix, spec.name)
        weight = rng.uniform(-bound, bound, size=spec.weight_shape).astype(dtype)
        bias = np.zeros(spec.bias_shape, dtype=dtype)
        for suffix, value in (("weight", weight), ("bias", bias)):
            name = f"{prefix}.{spec.name}.{suffix}"
            params[name] = Parameter(name, value)

    weights = ModelWeights(prefix, layers, params)
    logger.debug(
        "Initialized %s: %d layers, %d parameters",
        prefix,
        len(layers),
        param_count(weights),
    )
    return weights


def apply_layer(weights: ModelWeights, name: str, x: Tensor) -> Tensor:
    """Convolution of a named layer followed by its activation."""
    spec = weights.layer(name)
    out = conv2d(
        x,
        weights.weight(name).value,
        weights.bias(name).value,
        stride=spec.stride,
        groups=spec.groups,
    )
    if spec.activation == "relu":
        return relu(out)
    if spec.activation == "leaky_relu":
        return leaky_relu(out, LEAKY_SLOPE)
    return out


def check_divisible(shape: Tuple[int, ...], factor: int, what: str) -> None:
    """Reject images whose height or width is not a multiple of factor."""
    h, w = shape[-2:]
    if h % factor or w % factor:
        raise ShapeError(
            f"{what} requires H and W divisible by {factor}, got {h}x{w}"
        )
