# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Objectives, training loop and evaluation of the denoiser.

"""
from .config import DEFAULT_ALPHA, LossRecord, TrainConfig, TrainState
from .engine import (
    LossLog,
    PreparedBatch,
    epoch_windows,
    prepare_batch,
    read_loss_log,
    resume_state,
    run_training,
    train_epoch,
    train_step,
)
from .evaluation import (
    EvalSample,
    compare_sequences,
    denoise_sequence,
    evaluate,
    make_eval_samples,
    run_benchmark,
)
from .losses import (
    combined_loss_weight,
    loss_pd,
    loss_pd_jsn,
    loss_st,
    loss_unsupervised,
)

__all__ = [
    "DEFAULT_ALPHA",
    "EvalSample",
    "LossLog",
    "LossRecord",
    "PreparedBatch",
    "TrainConfig",
    "TrainState",
    "combined_loss_weight",
    "compare_sequences",
    "denoise_sequence",
    "epoch_windows",
    "evaluate",
    "loss_pd",
    "loss_pd_jsn",
    "loss_st",
    "loss_unsupervised",
    "make_eval_samples",
    "prepare_batch",
    "read_loss_log",
    "resume_state",
    "run_benchmark",
    "run_training",
    "train_epoch",
    "train_step",
]
