# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Seeded random streams.

Every random draw in fitvnet (weight initialization, noise synthesis, window
sampling, cropping) goes through a Philox counter-based generator keyed by a
SeedSequence built from the user seed and a tuple of stream identifiers. Two
streams sharing the seed but differing in any identifier are statistically
independent, and a given (seed, stream) always replays the same values.

"""
import zlib
from typing import Union

import numpy as np

StreamKey = Union[int, str]


def _entropy(key: StreamKey) -> int:
    """Map a stream identifier onto a non-negative integer."""
    if isinstance(key, str):
        return zlib.crc32(key.encode("utf-8"))
    if key < 0:
        raise ValueError(f"Stream identifiers must be non-negative, got {key}")
    return int(key)


def make_rng(seed: int, *stream: StreamKey) -> np.random.Generator:
    """Create the generator of a random stream.

    Parameters
    ----------
    seed : int
        User provided seed, a non-negative 64 bits integer.

    *stream : int | str
        Identifiers of the sub-stream, for example ``("awgn", frame_index)``.

    """
    if seed < 0:
        raise ValueError(f"Seeds must be non-negative, got {seed}")
    sequence = np.random.SeedSequence([int(seed)] + [_entropy(k) for k in stream])
    return np.random.Generator(np.random.Philox(sequence))


def derive_seed(seed: int, *stream: StreamKey) -> int:
    """Derive a 63 bits sub-seed, used when a seed must be recorded in a spec."""
    sequence = np.random.SeedSequence([int(seed)] + [_entropy(k) for k in stream])
    return int(sequence.generate_state(1, np.uint64)[0] >> np.uint64(1))
