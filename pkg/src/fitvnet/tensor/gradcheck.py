# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Comparison of reverse-mode gradients against central finite differences.

The output of the checked operation is reduced to a scalar through a fixed
random projection R, so that a single backward sweep (with upstream R)
yields the analytic gradient of every input coordinate. Each coordinate (or
a random subset of them) is then perturbed by +/- h and the central
difference of the projected output is compared to the analytic value.

The check always runs in 64-bit precision: inputs are copied to float64 and
the parameters taking part in the check are temporarily promoted.

"""
import logging
from typing import Callable, Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from ..errors import GradCheckError
from ..utils.rng import make_rng
from .core import Tensor, no_grad
from .optim import Parameter

logger = logging.getLogger(__name__)

#: Floor of the denominator of the relative error.
DENOMINATOR_FLOOR = 1e-8


def relative_error(analytic: float, numeric: float) -> float:
    """|a - n| / max(|a|, |n|, 1e-8)"""
    denominator = max(abs(analytic), abs(numeric), DENOMINATOR_FLOOR)
    return abs(analytic - numeric) / denominator


def finite_diff_grad_check(
    op: Callable[..., Tensor],
    inputs: Sequence[Union[Tensor, np.ndarray]],
    perturbation: float = 1e-3,
    params: Sequence[Parameter] = (),
    samples: Optional[int] = None,
    seed: int = 0,
) -> float:
    """Maximum relative error between analytic and numeric gradients.

    Parameters
    ----------
    op : Callable
        Pure and deterministic function called with one Tensor per input.

    inputs : Sequence[Tensor | np.ndarray]
        Values at which the gradient is checked. They are copied.

    perturbation : float
        Step h of the central difference (f(x + h) - f(x - h)) / 2h.

    params : Sequence[Parameter]
        Parameters used by op through its closure whose gradient should also
        be checked.

    samples : int, optional
        Number of coordinates checked per input or parameter, all of them by
        default.

    seed : int
        Seed of the projection and of the coordinate sampling.

    Raises
    ------
    GradCheckError
        If a non finite value appears in the outputs or in the gradients.

    """
    leaves = [
        Tensor(np.array(_array(value), dtype=np.float64), requires_grad=True)
        for value in inputs
    ]
    saved = [(p, p.value.data, p.value.grad) for p in params]
    try:
        for p in params:
            p.value.data = p.value.data.astype(np.float64)
            p.value.grad = None

        out = op(*leaves)
        _ensure_finite(out.data, "forward output")
        rng = make_rng(seed, "gradcheck")
        projection = rng.uniform(-1.0, 1.0, size=out.shape)
        out.backward(projection)

        targets = [(f"input {i}", t.data, t.grad) for i, t in enumerate(leaves)]
        targets += [(p.name, p.value.data, p.value.grad) for p in params]

        worst = 0.0
        for label, data, grad in targets:
            analytic = np.zeros_like(data) if grad is None else grad
            _ensure_finite(analytic, f"gradient of {label}")
            label_worst = 0.0
            for index in _coordinates(data.shape, samples, rng):
                original = data[index]
                data[index] = original + perturbation
                plus = _objective(op, leaves, projection)
                data[index] = original - perturbation
                minus = _objective(op, leaves, projection)
                data[index] = original
                numeric = (plus - minus) / (2.0 * perturbation)
                label_worst = max(
                    label_worst, relative_error(float(analytic[index]), numeric)
                )
            logger.debug("Gradient of %s: max relative error %.3e", label, label_worst)
            worst = max(worst, label_worst)
    finally:
        for p, data, grad in saved:
            p.value.data = data
            p.value.grad = grad

    return worst


# =============================================================================
# --- Private API -------------------------------------------------------------
# =============================================================================


def _array(value: Union[Tensor, np.ndarray]) -> np.ndarray:
    return value.data if isinstance(value, Tensor) else np.asarray(value)


def _ensure_finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise GradCheckError(f"Non finite values found in the {what}")


def _objective(
    op: Callable[..., Tensor], leaves: Sequence[Tensor], projection: np.ndarray
) -> float:
    """Projected output, evaluated without recording a graph."""
    with no_grad():
        out = op(*leaves)
    _ensure_finite(out.data, "perturbed forward output")
    return float(np.sum(out.data * projection))


def _coordinates(
    shape: Tuple[int, ...], samples: Optional[int], rng: np.random.Generator
) -> Iterator[Tuple[int, ...]]:
    size = int(np.prod(shape))
    if samples is None or samples >= size:
        yield from np.ndindex(*shape)
        return
    for flat in np.sort(rng.choice(size, size=samples, replace=False)):
        yield tuple(int(i) for i in np.unravel_index(flat, shape))
