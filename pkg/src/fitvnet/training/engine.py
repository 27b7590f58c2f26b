# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Training loop.

Every random draw of a step (crop location, noise level, noise streams) is
keyed on the run seed, the global step and the position of the window in the
batch. The loss trace of a run is thus fixed by its seed whatever the timing
of the prefetching thread, and a run resumed from a checkpoint reproduces the
steps of the interrupted one.

"""
import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union

import numpy as np
from atom.api import Atom, Int, List as AList, Typed, Value

from ..data.checkpoint import (
    Checkpoint,
    checkpoint_from_net,
    restore_net,
    save_checkpoint,
)
from ..data.sequence import FrameSequence
from ..data.windows import crop_window, sample_window
from ..errors import DataError
from ..models.fitvnet import WINDOW_FRAMES, WINDOW_HALF_WIDTH, fitvnet_forward
from ..noise.spec import NoiseSpec
from ..noise.synthesis import independent_spec, render_noise
from ..tensor.core import DEFAULT_DTYPE, Tensor
from ..tensor.ops import add, scale
from ..utils.rng import derive_seed, make_rng
from .config import LossRecord, TrainConfig, TrainState
from .losses import (
    combined_loss_weight,
    loss_pd,
    loss_pd_jsn,
    loss_st,
    loss_unsupervised,
)
from .prefetch import iterate_prepared

logger = logging.getLogger(__name__)

Window = List[np.ndarray]


class PreparedBatch(Atom):
    """Cropped and noised windows, stacked along the batch axis."""

    #: Global step the batch was prepared for.
    step = Int()

    #: Five (N, 3, P, P) noisy frames.
    frames = AList(Typed(Tensor))

    #: (N, 1, P, P) map holding the noise level of every window.
    noise_map = Typed(Tensor)

    #: Five clean frames, left empty for the unsupervised variant.
    clean = AList(Typed(Tensor))

    #: Five independently re-noised frames, for the variants needing them.
    noisy_targets = AList(Typed(Tensor))

    #: Noise of the inputs, one spec per window.
    input_specs = AList(Typed(NoiseSpec))

    #: Noise of the noisy targets, one spec per window.
    target_specs = AList(Typed(NoiseSpec))

    @property
    def size(self) -> int:
        return len(self.input_specs)


def window_noise_spec(config: TrainConfig, seed: int) -> NoiseSpec:
    """Noise of one training window.

    AWGN levels are drawn uniformly in the configured range, one per window so
    that the noise map stays constant over the window.

    """
    if config.mixed:
        return NoiseSpec.mixed(seed)
    low, high = config.sigma_range
    sigma = float(make_rng(seed, "sigma").uniform(low, high)) if high > low else low
    return NoiseSpec.awgn(sigma, seed)


def prepare_batch(
    config: TrainConfig, windows: Sequence[Window], step: int
) -> PreparedBatch:
    """Crop, noise and stack windows of five clean frames."""
    if not windows:
        raise DataError("Cannot prepare an empty batch")
    noisy: List[List[np.ndarray]] = []
    clean: List[List[np.ndarray]] = []
    targets: List[List[np.ndarray]] = []
    input_specs, target_specs, sigmas = [], [], []
    for j, window in enumerate(windows):
        if len(window) != WINDOW_FRAMES:
            raise DataError(
                f"Training windows hold {WINDOW_FRAMES} frames, got {len(window)}"
            )
        seed = derive_seed(config.seed, "batch", step, j)
        crop = FrameSequence(crop_window(window, config.patch, seed))
        spec = window_noise_spec(config, seed)
        noisy.append(render_noise(crop, spec).frames)
        input_specs.append(spec)
        sigmas.append(spec.sigma)
        if config.variant != "unsupervised":
            clean.append(crop.frames)
        if config.uses_noisy_targets:
            target_spec = independent_spec(spec)
            targets.append(render_noise(crop, target_spec).frames)
            target_specs.append(target_spec)

    patch = config.patch
    noise_map = np.broadcast_to(
        np.asarray(sigmas, dtype=DEFAULT_DTYPE)[:, None, None, None],
        (len(windows), 1, patch, patch),
    )
    return PreparedBatch(
        step=step,
        frames=_stack(noisy, "noisy"),
        noise_map=Tensor(noise_map.copy(), tag="noise_map"),
        clean=_stack(clean, "clean"),
        noisy_targets=_stack(targets, "noisy_target"),
        input_specs=input_specs,
        target_specs=target_specs,
    )


def train_step(
    state: TrainState,
    config: TrainConfig,
    batch: PreparedBatch,
    loss_log: Optional["LossLog"] = None,
) -> LossRecord:
    """Forward, variant objective, backward and one ADAM step."""
    state.optimizer.zero_grad()
    reads = state.target_reads
    center, stage1 = fitvnet_forward(state.net, batch.frames, batch.noise_map)
    weight = combined_loss_weight(state.epoch_index, config.effective_alpha)

    variant = config.variant
    l_pd = None
    if variant == "base":
        l_st = loss_st(center, batch.clean[WINDOW_HALF_WIDTH], reads)
        total = l_st
    else:
        if variant == "jsc":
            l_pd = loss_pd(stage1, batch.clean, reads)
        else:
            l_pd = loss_pd_jsn(
                stage1,
                batch.noisy_targets,
                batch.input_specs,
                batch.target_specs,
                reads,
            )
        if variant == "unsupervised":
            l_st = loss_unsupervised(center, stage1[WINDOW_HALF_WIDTH], reads)
        else:
            l_st = loss_st(center, batch.clean[WINDOW_HALF_WIDTH], reads)
        total = add(scale(l_pd, weight), l_st)

    total.backward()
    state.optimizer.step()
    state.iteration += 1
    record = LossRecord(
        step=state.iteration,
        epoch=state.epoch_index,
        weight=weight,
        l_pd=None if l_pd is None else l_pd.item(),
        l_st=l_st.item(),
        total=total.item(),
    )
    state.loss_history.append(record)
    if loss_log is not None:
        loss_log.write(record)
    logger.debug(
        "step %d: total %.6g (l_st %.6g)", record.step, record.total, record.l_st
    )
    return record


def train_epoch(
    state: TrainState,
    config: TrainConfig,
    data: Iterable[Window],
    loss_log: Optional["LossLog"] = None,
) -> TrainState:
    """Run one epoch over windows of clean frames and advance the epoch index.

    Raises
    ------
    DataError
        If data holds no window.

    """
    windows = list(data)
    if not windows:
        raise DataError("No training window, the epoch cannot run")
    size = config.batch_size
    batches = [windows[i : i + size] for i in range(0, len(windows), size)]
    first_step = state.iteration + 1

    def prepare(index: int, batch: Sequence[Window]) -> PreparedBatch:
        return prepare_batch(config, batch, first_step + index)

    losses = []
    for _, prepared in iterate_prepared(batches, prepare, config.prefetch):
        losses.append(train_step(state, config, prepared, loss_log).total)
    logger.info(
        "Epoch %d done (%d steps): mean loss %.6g",
        state.epoch_index,
        len(losses),
        float(np.mean(losses)),
    )
    state.epoch_index += 1
    return state


def epoch_windows(
    sequences: Sequence[FrameSequence], seed: int, epoch: int, k: int = 2
) -> List[Window]:
    """One random window per sequence, the sequences being shuffled."""
    order = make_rng(seed, "order", epoch).permutation(len(sequences))
    return [
        sample_window(sequences[int(i)], k, seed, "epoch", epoch, int(i))
        for i in order
    ]


def resume_state(checkpoint: Checkpoint, state: TrainState) -> TrainState:
    """Load a checkpoint into a state, the next epoch follows the stored one."""
    epoch, iteration = restore_net(checkpoint, state.net)
    state.epoch_index = epoch + 1
    state.iteration = iteration
    logger.info("Resumed from epoch %d, step %d", epoch, iteration)
    return state


def run_training(
    config: TrainConfig,
    sequences: Sequence[FrameSequence],
    out_dir: Union[str, Path],
    state: TrainState,
) -> List[Path]:
    """Train till config.epochs, writing a checkpoint after every epoch.

    Checkpoints are named ``epoch_XXX.fitv`` and the losses are appended to
    ``loss.log``, both in out_dir.

    Returns
    -------
    list[Path]
        Checkpoints written by this call.

    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    with LossLog(out_dir / "loss.log") as loss_log:
        while state.epoch_index <= config.epochs:
            epoch = state.epoch_index
            windows = epoch_windows(sequences, config.seed, epoch)
            train_epoch(state, config, windows, loss_log)
            checkpoint = checkpoint_from_net(
                state.net, config.variant, epoch, state.iteration
            )
            written.append(
                save_checkpoint(checkpoint, out_dir / f"epoch_{epoch:03d}.fitv")
            )
    return written


class LossLog(Atom):
    """Plain text log of the losses, one line per step, appended to.

    Columns are ``step epoch weight l_pd l_st total`` separated by spaces,
    ``l_pd`` being ``nan`` for the variants that do not evaluate it. Floats
    are written with repr so that they read back exactly.

    """

    #: File the lines are appended to.
    path = Typed(Path)

    def __init__(self, path: Union[str, Path]) -> None:
        super().__init__(path=Path(path))

    def __enter__(self) -> "LossLog":
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._file = open(self.path, "a", encoding="utf-8")
        return self

    def __exit__(self, *args) -> None:
        self.close()

    def write(self, record: LossRecord) -> None:
        if self._file is None:
            raise DataError(f"Loss log {self.path} is not open")
        l_pd = math.nan if record.l_pd is None else record.l_pd
        fields = (record.weight, l_pd, record.l_st, record.total)
        self._file.write(
            f"{record.step} {record.epoch} " + " ".join(repr(f) for f in fields) + "\n"
        )
        self._file.flush()

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None

    # =========================================================================
    # --- Private API ---------------------------------------------------------
    # =========================================================================

    #: Open file object.
    _file = Value()


def read_loss_log(path: Union[str, Path]) -> List[LossRecord]:
    """Parse a loss log written by LossLog."""
    records = []
    for number, line in enumerate(Path(path).read_text("utf-8").splitlines(), 1):
        parts = line.split()
        if not parts:
            continue
        try:
            step, epoch = int(parts[0]), int(parts[1])
            weight, l_pd, l_st, total = (float(p) for p in parts[2:])
        except ValueError as e:
            raise DataError(f"Malformed line {number} in {path}: {e}") from e
        records.append(
            LossRecord(
                step=step,
                epoch=epoch,
                weight=weight,
                l_pd=None if math.isnan(l_pd) else l_pd,
                l_st=l_st,
                total=total,
            )
        )
    return records


# =============================================================================
# --- Private API -------------------------------------------------------------
# =============================================================================


def _stack(windows: Sequence[Sequence[np.ndarray]], tag: str) -> List[Tensor]:
    """Stack per-window frames into one batch tensor per temporal position."""
    if not windows:
        return []
    return [
        Tensor(np.stack([w[t] for w in windows]), tag=tag)
        for t in range(len(windows[0]))
    ]
