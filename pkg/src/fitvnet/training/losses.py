# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Training objectives.

Every loss accepts an optional Counter in which the provenance tag of each
target it reads is counted. The training loop uses it to prove that the
unsupervised variant never reads a clean frame.

"""
from collections import Counter
from typing import Optional, Sequence, Union

from ..errors import ConfigError, ShapeError
from ..noise.spec import NoiseSpec
from ..tensor.core import Tensor
from ..tensor.ops import add, detach, mse_loss


def loss_pd(
    stage1_outputs: Sequence[Tensor],
    targets: Sequence[Tensor],
    reads: Optional[Counter] = None,
) -> Tensor:
    """Sum over the frames of the MSE between first stage outputs and targets."""
    if len(stage1_outputs) != len(targets):
        raise ShapeError(
            f"{len(stage1_outputs)} first stage outputs but {len(targets)} targets"
        )
    if not targets:
        raise ShapeError("The first stage loss needs at least one frame")
    total = None
    for output, target in zip(stage1_outputs, targets):
        _record(reads, target)
        term = mse_loss(output, target)
        total = term if total is None else add(total, term)
    return total


def loss_pd_jsn(
    stage1_outputs: Sequence[Tensor],
    noisy_targets: Sequence[Tensor],
    input_spec: Union[NoiseSpec, Sequence[NoiseSpec]],
    target_spec: Union[NoiseSpec, Sequence[NoiseSpec]],
    reads: Optional[Counter] = None,
) -> Tensor:
    """First stage loss against independently re-noised frames.

    The specs can be given per batch element, as two sequences of equal length.

    Raises
    ------
    ConfigError
        If the targets were rendered with the seed of the inputs, their noise
        would then not be independent of the input noise.

    """
    inputs = [input_spec] if isinstance(input_spec, NoiseSpec) else input_spec
    targets = [target_spec] if isinstance(target_spec, NoiseSpec) else target_spec
    if len(inputs) != len(targets):
        raise ShapeError(f"{len(inputs)} input specs but {len(targets)} target specs")
    for i, (spec_in, spec_target) in enumerate(zip(inputs, targets)):
        if spec_target.seed == spec_in.seed:
            raise ConfigError(
                f"Noisy targets of element {i} share the seed {spec_in.seed} of "
                "the inputs, their noise must be independent"
            )
    return loss_pd(stage1_outputs, noisy_targets, reads)


def loss_st(
    final_output: Tensor, clean_center: Tensor, reads: Optional[Counter] = None
) -> Tensor:
    """MSE between the denoised and the clean centre frame."""
    _record(reads, clean_center)
    return mse_loss(final_output, clean_center)


def loss_unsupervised(
    final_output: Tensor, stage1_center: Tensor, reads: Optional[Counter] = None
) -> Tensor:
    """MSE between the final output and the (constant) first stage centre."""
    target = detach(stage1_center)
    target.tag = "stage1"
    _record(reads, target)
    return mse_loss(final_output, target)


def combined_loss_weight(epoch_index: int, alpha: float) -> float:
    """Weight alpha / e of the first stage loss during epoch e (1-based)."""
    if epoch_index < 1:
        raise ConfigError(f"Epoch indexes start at 1, got {epoch_index}")
    return alpha / epoch_index


def _record(reads: Optional[Counter], target: Tensor) -> None:
    if reads is not None:
        reads[target.tag or "untagged"] += 1
