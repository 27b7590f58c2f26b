# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Per-frame spatial denoiser (first stage).

A U-shaped network in which pooling layers are replaced by stride 2
convolutions. The encoder keeps 48 channels and halves the resolution five
times, the skip connections being taken on the stride 2 outputs. The decoder
upsamples by nearest neighbour replication, concatenates the matching skip
and ends with a 99 -> 64 -> 32 -> 3 head whose last activation is a
LeakyReLU.

"""
from typing import Dict, List, Optional, Tuple

from atom.api import Atom, Typed

from ..errors import ShapeError
from ..tensor.core import DEFAULT_DTYPE, Tensor, no_grad
from ..tensor.ops import clamp01, concat_channels, upsample_nearest_2x
from .layers import (
    LayerSpec,
    ModelWeights,
    apply_layer,
    check_divisible,
    init_weights,
)

#: Total downsampling factor of the encoder.
SPATIAL_DIVISOR = 32

#: Width of the encoder.
ENC_WIDTH = 48

#: Width of the decoder.
DEC_WIDTH = 96

#: Encoder layers whose output feeds a decoder concatenation, deepest last.
SKIP_LAYERS = ("enc_conv1b", "enc_conv2b", "enc_conv3b", "enc_conv4b")


def spatial_layer_schedule() -> List[LayerSpec]:
    """Resolved layer list of the spatial denoiser."""
    e, d = ENC_WIDTH, DEC_WIDTH
    return [
        LayerSpec("enc_conv0", 3, e),
        LayerSpec("enc_conv1a", e, e),
        LayerSpec("enc_conv1b", e, e, stride=2),
        LayerSpec("enc_conv2a", e, e),
        LayerSpec("enc_conv2b", e, e, stride=2),
        LayerSpec("enc_conv3a", e, e),
        LayerSpec("enc_conv3b", e, e, stride=2),
        LayerSpec("enc_conv4a", e, e),
        LayerSpec("enc_conv4b", e, e, stride=2),
        LayerSpec("enc_conv5a", e, e),
        LayerSpec("enc_conv5b", e, e, stride=2),
        LayerSpec("enc_conv6", e, e),
        LayerSpec("dec_conv5a", e + e, d),
        LayerSpec("dec_conv5b", d, d),
        LayerSpec("dec_conv4a", d + e, d),
        LayerSpec("dec_conv4b", d, d),
        LayerSpec("dec_conv3a", d + e, d),
        LayerSpec("dec_conv3b", d, d),
        LayerSpec("dec_conv2a", d + e, d),
        LayerSpec("dec_conv2b", d, d),
        LayerSpec("dec_conv1a", d + 3, 64),
        LayerSpec("dec_conv1b", 64, 32),
        LayerSpec("dec_conv0", 32, 3, activation="leaky_relu"),
    ]


class SpatialDenoiser(Atom):
    """Weights of the first stage, shared across the frames of a window."""

    #: Parameters of every layer of the schedule.
    weights = Typed(ModelWeights)

    def parameters(self):
        return self.weights.parameters()


def build_spatial_denoiser(
    seed: int, prefix: str = "spatial", dtype: type = DEFAULT_DTYPE
) -> SpatialDenoiser:
    """Instantiate the spatial denoiser with seeded initialization."""
    return SpatialDenoiser(
        weights=init_weights(prefix, spatial_layer_schedule(), seed, dtype)
    )


def spatial_forward(
    model: SpatialDenoiser,
    frame: Tensor,
    inference: bool = False,
    trace: Optional[Dict[str, Tuple[int, ...]]] = None,
) -> Tensor:
    """Denoise a batch of frames.

    Parameters
    ----------
    model : SpatialDenoiser
        Weights to use.

    frame : Tensor
        (N, 3, H, W) noisy frames, H and W divisible by 32.

    inference : bool, optional
        Evaluate without recording the graph and clamp the output to [0, 1].

    trace : dict, optional
        When given, filled with the output shape of every layer.

    """
    check_divisible(frame.shape, SPATIAL_DIVISOR, "The spatial denoiser")
    if frame.shape[1] != 3:
        raise ShapeError(
            f"The spatial denoiser expects 3 channels, got {frame.shape[1]}"
        )
    if inference:
        with no_grad():
            return clamp01(_forward(model.weights, frame, trace))
    return _forward(model.weights, frame, trace)


# =============================================================================
# --- Private API -------------------------------------------------------------
# =============================================================================


def _forward(
    weights: ModelWeights,
    frame: Tensor,
    trace: Optional[Dict[str, Tuple[int, ...]]],
) -> Tensor:
    def layer(name: str, x: Tensor) -> Tensor:
        out = apply_layer(weights, name, x)
        if trace is not None:
            trace[name] = out.shape
        return out

    x = layer("enc_conv0", frame)
    skips = {}
    for stage in range(1, 6):
        x = layer(f"enc_conv{stage}a", x)
        x = layer(f"enc_conv{stage}b", x)
        if f"enc_conv{stage}b" in SKIP_LAYERS:
            skips[stage] = x
    x = layer("enc_conv6", x)

    for stage in range(5, 1, -1):
        x = upsample_nearest_2x(x)
        x = concat_channels([x, skips[stage - 1]])
        if trace is not None:
            trace[f"dec_concat{stage}"] = x.shape
        x = layer(f"dec_conv{stage}a", x)
        x = layer(f"dec_conv{stage}b", x)

    x = upsample_nearest_2x(x)
    x = concat_channels([x, frame])
    if trace is not None:
        trace["dec_concat1"] = x.shape
    x = layer("dec_conv1a", x)
    x = layer("dec_conv1b", x)
    return layer("dec_conv0", x)
