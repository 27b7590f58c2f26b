# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Dense 4-D tensors with reverse-mode gradient propagation.

A Tensor produced by a differentiable operation keeps references to its
parents and a closure mapping the gradient of the output onto the gradients
of the parents. Tensor.backward walks this graph in reverse topological
order. Only leaves (tensors without parents, typically parameter values or
inputs under test) accumulate into their ``grad`` member; intermediate
gradients live in a temporary mapping for the duration of the sweep.

"""
import threading
from contextlib import contextmanager
from typing import Callable as TCallable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from atom.api import Atom, Bool, Callable, Str, Tuple as ATuple, Typed

from ..errors import GraphError, ShapeError

#: Default floating point type of the numerical core.
DEFAULT_DTYPE = np.float32

_state = threading.local()


def is_grad_enabled() -> bool:
    """Whether operations currently record the autodiff graph."""
    return getattr(_state, "enabled", True)


@contextmanager
def no_grad() -> Iterator[None]:
    """Disable graph recording in the current thread (inference, evaluation)."""
    previous = is_grad_enabled()
    _state.enabled = False
    try:
        yield
    finally:
        _state.enabled = previous


class Tensor(Atom):
    """Dense (N, C, H, W) real array with an optional gradient buffer."""

    #: Values, row-major over (N, C, H, W).
    data = Typed(np.ndarray)

    #: Accumulated gradient of a leaf tensor, same shape as data.
    grad = Typed(np.ndarray)

    #: Whether gradients should flow to (or through) this tensor.
    requires_grad = Bool()

    #: Free form provenance label ("clean", "noisy", ...) used by audits.
    tag = Str()

    def __init__(
        self,
        data: np.ndarray,
        requires_grad: bool = False,
        tag: str = "",
        dtype: Optional[type] = None,
    ) -> None:
        array = np.asarray(data, dtype=dtype)
        if not np.issubdtype(array.dtype, np.floating):
            array = array.astype(DEFAULT_DTYPE)
        if array.ndim != 4 or any(s <= 0 for s in array.shape):
            raise ShapeError(
                f"Tensors are (N, C, H, W) arrays of positive sizes, got {array.shape}"
            )
        super().__init__(data=array, requires_grad=requires_grad, tag=tag)

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return self.data.shape  # type: ignore

    @property
    def dtype(self) -> np.dtype:
        return self.data.dtype

    @property
    def is_leaf(self) -> bool:
        return not self._parents

    def item(self) -> float:
        """Value of a single element tensor as a Python float."""
        if self.data.size != 1:
            raise ShapeError(f"item() requires a single element, shape is {self.shape}")
        return float(self.data.reshape(-1)[0])

    def numpy(self) -> np.ndarray:
        """The underlying array (not a copy)."""
        return self.data

    def zero_grad(self) -> None:
        """Drop the accumulated gradient."""
        self.grad = None

    def backward(self, upstream: Optional[np.ndarray] = None) -> None:
        """Propagate gradients from this tensor to every leaf requiring them.

        Parameters
        ----------
        upstream : np.ndarray, optional
            Gradient of the final objective with respect to this tensor. It
            defaults to one for single element tensors (losses).

        """
        if not self.requires_grad:
            raise GraphError("backward() called on a tensor that does not require grad")
        if upstream is None:
            if self.data.size != 1:
                raise GraphError(
                    "An upstream gradient is required for non scalar tensors, "
                    f"shape is {self.shape}"
                )
            upstream = np.ones_like(self.data)
        upstream = np.asarray(upstream, dtype=self.dtype)
        if upstream.shape != self.shape:
            raise ShapeError(
                f"Upstream gradient shape {upstream.shape} does not match {self.shape}"
            )

        grads = {id(self): upstream}
        for node in reversed(_topological_order(self)):
            grad = grads.pop(id(node), None)
            if grad is None:
                continue
            if node.is_leaf:
                node.grad = grad.copy() if node.grad is None else node.grad + grad
                continue
            for parent, parent_grad in zip(node._parents, node._backward(grad)):
                if parent_grad is None or not parent.requires_grad:
                    continue
                key = id(parent)
                if key in grads:
                    grads[key] = grads[key] + parent_grad
                else:
                    grads[key] = parent_grad

    # =========================================================================
    # --- Private API ---------------------------------------------------------
    # =========================================================================

    #: Tensors this one was computed from (empty for leaves).
    _parents = ATuple()

    #: Closure mapping the output gradient onto one gradient per parent.
    _backward = Callable()


def _topological_order(root: Tensor) -> List[Tensor]:
    """Order the graph below root so that parents come before children."""
    order: List[Tensor] = []
    visited = set()
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in reversed(node._parents):
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


def make_result(
    data: np.ndarray,
    parents: Sequence[Tensor],
    backward: TCallable[[np.ndarray], Sequence[Optional[np.ndarray]]],
) -> Tensor:
    """Wrap the output of an operation, recording it in the graph if needed.

    Parameters
    ----------
    data : np.ndarray
        Output values.

    parents : Sequence[Tensor]
        Operands of the operation, in the order used by backward.

    backward : Callable
        Function returning one gradient (or None) per parent.

    """
    track = is_grad_enabled() and any(p.requires_grad for p in parents)
    out = Tensor(data, requires_grad=track)
    if track:
        out._parents = tuple(parents)
        out._backward = backward
    return out
