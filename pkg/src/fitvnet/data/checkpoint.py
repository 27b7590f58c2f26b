# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Binary checkpoints of the weights and of the optimizer state.

Layout, all integers little-endian::

    b"FITV" | u32 version | u32 tensor count
    per tensor: u16 name length | UTF-8 name | u8 rank | rank x u32 dims
                | prod(dims) x float32 values
    u64 CRC-64 (ECMA-182) of every preceding byte

Besides the weights (``spatial.*``, ``block1.*``, ``block2.*``) a training
checkpoint stores the ADAM moments (``adam_m/<name>``, ``adam_v/<name>``) and
step counts (``adam_t/<name>``) of every parameter and the metadata tensors
``meta/epoch``, ``meta/iteration`` and ``meta/variant/<variant>``.

Counters (step counts, epoch and iteration) are stored as two float32 values
``[high, low]`` with ``value = high * COUNTER_BASE + low``, each half being an
integer exactly representable in float32.

"""
import logging
import os
import struct
import tempfile
from collections import OrderedDict
from pathlib import Path
from typing import Mapping, Tuple, Union

import crcmod.predefined
import numpy as np
from atom.api import Atom, Int, Str, Typed

from ..errors import CheckpointError
from ..models.fitvnet import FitvNet

logger = logging.getLogger(__name__)

#: Leading bytes of every checkpoint.
MAGIC = b"FITV"

#: Version written by this module, the only one it reads.
FORMAT_VERSION = 1

#: Value type of the stored tensors.
VALUE_DTYPE = np.dtype("<f4")

#: Base of the two halves of a stored counter, float32 is exact below it.
COUNTER_BASE = 2**24

_crc64 = crcmod.predefined.mkPredefinedCrcFun("crc-64-we")

PathLike = Union[str, Path]


class Checkpoint(Atom):
    """Decoded content of a checkpoint file."""

    #: Format version read from the file.
    version = Int(FORMAT_VERSION)

    #: Training variant the weights come from.
    variant = Str()

    #: Last completed epoch (1-based, 0 before training).
    epoch = Int()

    #: Number of optimizer steps performed.
    iteration = Int()

    #: Weights and optimizer state by name, in file order.
    tensors = Typed(OrderedDict, ())

    def weights(self) -> "OrderedDict[str, np.ndarray]":
        """Tensors that are not optimizer state nor metadata."""
        return OrderedDict(
            (k, v) for k, v in self.tensors.items() if "/" not in k
        )


def encode_checkpoint(checkpoint: Checkpoint) -> bytes:
    """Serialize a checkpoint, metadata tensors are regenerated."""
    tensors = _with_metadata(checkpoint)
    chunks = [MAGIC, struct.pack("<II", FORMAT_VERSION, len(tensors))]
    for name, value in tensors.items():
        encoded = name.encode("utf-8")
        if len(encoded) > 0xFFFF:
            raise CheckpointError(f"Tensor name too long: {name[:40]}...")
        array = np.asarray(value)
        if array.ndim > 0xFF:
            raise CheckpointError(f"Tensor {name} has too many dimensions")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack(f"<B{array.ndim}I", array.ndim, *array.shape))
        chunks.append(np.ascontiguousarray(array, dtype=VALUE_DTYPE).tobytes())
    body = b"".join(chunks)
    return body + struct.pack("<Q", _crc64(body))


def decode_checkpoint(data: bytes) -> Checkpoint:
    """Parse the bytes of a checkpoint.

    Raises
    ------
    CheckpointError
        On a bad magic, an unsupported version, a truncated file, a checksum
        mismatch or duplicated tensor names.

    """
    reader = _Reader(data)
    magic = reader.take(len(MAGIC), "magic")
    if magic != MAGIC:
        raise CheckpointError(f"Bad magic {magic!r}, expected {MAGIC!r}")
    version, count = reader.unpack("<II", "header")
    if version != FORMAT_VERSION:
        raise CheckpointError(
            f"Unsupported checkpoint version {version}, expected {FORMAT_VERSION}"
        )

    tensors: "OrderedDict[str, np.ndarray]" = OrderedDict()
    for i in range(count):
        (length,) = reader.unpack("<H", f"name length of tensor {i}")
        try:
            name = reader.take(length, f"name of tensor {i}").decode("utf-8")
        except UnicodeDecodeError as e:
            raise CheckpointError(f"Name of tensor {i} is not valid UTF-8") from e
        if name in tensors:
            raise CheckpointError(f"Duplicate tensor name {name}")
        (rank,) = reader.unpack("<B", f"rank of {name}")
        dims = reader.unpack(f"<{rank}I", f"dims of {name}")
        size = int(np.prod(dims, dtype=np.int64))
        raw = reader.take(size * VALUE_DTYPE.itemsize, f"values of {name}")
        tensors[name] = np.frombuffer(raw, dtype=VALUE_DTYPE).reshape(dims).copy()

    body_end = reader.offset
    (stored,) = reader.unpack("<Q", "checksum")
    if reader.offset != len(data):
        raise CheckpointError(
            f"{len(data) - reader.offset} unexpected bytes after the checksum"
        )
    computed = _crc64(data[:body_end])
    if stored != computed:
        raise CheckpointError(
            f"Checksum mismatch: stored {stored:#018x}, computed {computed:#018x}"
        )
    return _split_metadata(version, tensors)


def save_checkpoint(checkpoint: Checkpoint, path: PathLike) -> Path:
    """Write a checkpoint through a temporary file renamed in place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = encode_checkpoint(checkpoint)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.debug("Wrote checkpoint %s (%d bytes)", path, len(data))
    return path


def load_checkpoint(path: PathLike) -> Checkpoint:
    try:
        data = Path(path).read_bytes()
    except OSError as e:
        raise CheckpointError(f"Cannot read checkpoint {path}: {e}") from e
    return decode_checkpoint(data)


def encode_counter(value: int) -> np.ndarray:
    """Split a nonnegative counter into its exact float32 [high, low] pair."""
    value = int(value)
    if not 0 <= value < COUNTER_BASE**2:
        raise CheckpointError(f"Counter {value} cannot be stored")
    high, low = divmod(value, COUNTER_BASE)
    return np.array([high, low], dtype=VALUE_DTYPE)


def decode_counter(value: np.ndarray, name: str = "counter") -> int:
    """Rebuild a counter written by ``encode_counter``."""
    halves = np.asarray(value, dtype=np.float64)
    if halves.shape != (2,):
        raise CheckpointError(
            f"Counter {name} has shape {halves.shape}, expected (2,)"
        )
    high, low = halves
    if (
        not (high.is_integer() and low.is_integer())
        or high < 0
        or not 0 <= low < COUNTER_BASE
    ):
        raise CheckpointError(f"Counter {name} holds invalid halves {halves}")
    return int(high) * COUNTER_BASE + int(low)


def checkpoint_from_net(
    net: FitvNet,
    variant: str = "",
    epoch: int = 0,
    iteration: int = 0,
    include_optimizer: bool = True,
) -> Checkpoint:
    """Snapshot the weights and, optionally, the ADAM state of a network."""
    tensors: "OrderedDict[str, np.ndarray]" = OrderedDict(net.named_arrays())
    if include_optimizer:
        for p in net.parameters():
            tensors[f"adam_m/{p.name}"] = p.adam_m
            tensors[f"adam_v/{p.name}"] = p.adam_v
            tensors[f"adam_t/{p.name}"] = encode_counter(p.step_count)
    return Checkpoint(
        variant=variant, epoch=epoch, iteration=iteration, tensors=tensors
    )


def restore_net(
    checkpoint: Checkpoint, net: FitvNet, optimizer_state: bool = True
) -> Tuple[int, int]:
    """Load the weights (and ADAM state) of a checkpoint into a network.

    Everything is validated before the network is modified.

    Returns
    -------
    epoch, iteration : int
        Training progress stored in the checkpoint.

    Raises
    ------
    CheckpointError
        Listing every missing tensor, or naming the first tensor whose shape
        does not match the architecture.

    """
    tensors = checkpoint.tensors
    expected = OrderedDict()
    for p in net.parameters():
        expected[p.name] = p.shape
        if optimizer_state:
            expected[f"adam_m/{p.name}"] = p.shape
            expected[f"adam_v/{p.name}"] = p.shape
            expected[f"adam_t/{p.name}"] = (2,)

    missing = [name for name in expected if name not in tensors]
    if missing:
        raise CheckpointError(
            f"Checkpoint lacks {len(missing)} tensors: {', '.join(missing)}"
        )
    for name, shape in expected.items():
        if tuple(tensors[name].shape) != tuple(shape):
            raise CheckpointError(
                f"Tensor {name} has shape {tuple(tensors[name].shape)}, the "
                f"architecture expects {tuple(shape)}"
            )

    for weights in net.weight_sets():
        weights.load_arrays(tensors)
    if optimizer_state:
        for p in net.parameters():
            dtype = p.value.dtype
            p.adam_m = np.array(tensors[f"adam_m/{p.name}"], dtype=dtype)
            p.adam_v = np.array(tensors[f"adam_v/{p.name}"], dtype=dtype)
            p.step_count = decode_counter(
                tensors[f"adam_t/{p.name}"], f"adam_t/{p.name}"
            )
    else:
        for p in net.parameters():
            p.reset_state()
    return checkpoint.epoch, checkpoint.iteration


# =============================================================================
# --- Private API -------------------------------------------------------------
# =============================================================================


class _Reader:
    """Cursor over the bytes of a checkpoint raising on truncation."""

    def __init__(self, data: bytes) -> None:
        self.data = data
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.data):
            raise CheckpointError(
                f"Truncated checkpoint: {what} needs {size} bytes at offset "
                f"{self.offset}, {len(self.data) - self.offset} remain"
            )
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str, what: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def _with_metadata(checkpoint: Checkpoint) -> "OrderedDict[str, np.ndarray]":
    tensors = OrderedDict(
        (k, v) for k, v in checkpoint.tensors.items() if not k.startswith("meta/")
    )
    tensors["meta/epoch"] = encode_counter(checkpoint.epoch)
    tensors["meta/iteration"] = encode_counter(checkpoint.iteration)
    if checkpoint.variant:
        tensors[f"meta/variant/{checkpoint.variant}"] = np.asarray(
            1.0, dtype=VALUE_DTYPE
        )
    return tensors


def _split_metadata(
    version: int, tensors: Mapping[str, np.ndarray]
) -> Checkpoint:
    kept: "OrderedDict[str, np.ndarray]" = OrderedDict()
    epoch = iteration = 0
    variant = ""
    for name, value in tensors.items():
        if name == "meta/epoch":
            epoch = decode_counter(value, name)
        elif name == "meta/iteration":
            iteration = decode_counter(value, name)
        elif name.startswith("meta/variant/"):
            variant = name[len("meta/variant/") :]
        else:
            kept[name] = value
    return Checkpoint(
        version=version,
        variant=variant,
        epoch=epoch,
        iteration=iteration,
        tensors=kept,
    )
