# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Frame sequences and their storage as directories of 8-bit RGB images.

A sequence directory holds one lossless image per frame, the frame order
being the lexicographic order of the file names.

"""
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from atom.api import Atom, List as AList, Str, Typed
from PIL import Image, UnidentifiedImageError

from ..errors import DataError, ShapeError
from ..noise.spec import NoiseSpec
from ..tensor.core import DEFAULT_DTYPE

logger = logging.getLogger(__name__)

#: File extensions recognized as frames.
IMAGE_SUFFIXES = (".png", ".bmp", ".ppm", ".tif", ".tiff")

#: Name pattern of the frames written by fitvnet.
FRAME_PATTERN = "frame_{:04d}.png"

PathLike = Union[str, Path]


class FrameSequence(Atom):
    """Ordered same-sized RGB frames with values in [0, 1]."""

    #: (3, H, W) float arrays.
    frames = AList(Typed(np.ndarray))

    #: Directory the frames were read from, or "synthetic".
    source = Str("synthetic")

    #: Noise applied to the frames, None for clean frames.
    applied_noise = Typed(NoiseSpec)

    def __init__(
        self,
        frames: Iterable[np.ndarray],
        source: str = "synthetic",
        applied_noise: Optional[NoiseSpec] = None,
    ) -> None:
        arrays = [np.asarray(f, dtype=DEFAULT_DTYPE) for f in frames]
        if not arrays:
            raise ShapeError("A frame sequence needs at least one frame")
        shape = arrays[0].shape
        if len(shape) != 3 or shape[0] != 3:
            raise ShapeError(f"Frames are (3, H, W) arrays, got {shape}")
        for i, a in enumerate(arrays):
            if a.shape != shape:
                raise ShapeError(f"Frame {i} has shape {a.shape}, frame 0 has {shape}")
        super().__init__(frames=arrays, source=source, applied_noise=applied_noise)

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def size(self) -> Tuple[int, int]:
        """(H, W) of the frames."""
        return self.frames[0].shape[1:]  # type: ignore

    def stack(self) -> np.ndarray:
        """Frames as a single (T, 3, H, W) array."""
        return np.stack(self.frames)

    def derive(
        self, frames: Iterable[np.ndarray], applied_noise: Optional[NoiseSpec] = None
    ) -> "FrameSequence":
        """New sequence sharing the source of this one."""
        return FrameSequence(frames, self.source, applied_noise)


def list_frame_files(directory: PathLike) -> List[Path]:
    """Frame files of a directory in lexicographic order."""
    path = Path(directory)
    if not path.is_dir():
        raise DataError(f"{path} is not a directory")
    return sorted(
        p for p in path.iterdir() if p.is_file() and p.suffix.lower() in IMAGE_SUFFIXES
    )


def load_image(path: PathLike) -> np.ndarray:
    """Read an 8-bit RGB image as a (3, H, W) array of values x / 255."""
    try:
        with Image.open(path) as image:
            if image.mode not in ("RGB", "RGBA", "L", "P"):
                raise DataError(f"{path} is not an 8-bit image (mode {image.mode})")
            data = np.asarray(image.convert("RGB"), dtype=DEFAULT_DTYPE)
    except (UnidentifiedImageError, OSError) as e:
        if isinstance(e, DataError):
            raise
        raise DataError(f"Cannot decode {path}: {e}") from e
    return np.ascontiguousarray(data.transpose(2, 0, 1)) / DEFAULT_DTYPE(255)


def load_sequence(directory: PathLike) -> FrameSequence:
    """Read every frame of a sequence directory, in filename order.

    Raises
    ------
    DataError
        If the directory holds no frame, a file cannot be decoded or the
        frames do not share the same size.

    """
    files = list_frame_files(directory)
    if not files:
        raise DataError(f"No frame found in {directory}")
    frames = []
    for path in files:
        frame = load_image(path)
        if frames and frame.shape != frames[0].shape:
            raise DataError(
                f"{path} is {frame.shape[2]}x{frame.shape[1]}, the first frame "
                f"{files[0].name} is {frames[0].shape[2]}x{frames[0].shape[1]}"
            )
        frames.append(frame)
    logger.debug("Loaded %d frames from %s", len(frames), directory)
    return FrameSequence(frames, str(directory))


def quantize(image: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] and map to bytes, halves rounded away from zero."""
    clipped = np.clip(np.asarray(image, dtype=np.float64), 0.0, 1.0)
    return np.floor(clipped * 255.0 + 0.5).astype(np.uint8)


def save_image(image: np.ndarray, path: PathLike) -> Path:
    """Write a (3, H, W) image in [0, 1] as an 8-bit RGB file."""
    image = np.asarray(image)
    if image.ndim != 3 or image.shape[0] != 3:
        raise ShapeError(f"Images are (3, H, W) arrays, got {image.shape}")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        Image.fromarray(quantize(image).transpose(1, 2, 0), "RGB").save(path)
    except OSError as e:
        raise DataError(f"Cannot write {path}: {e}") from e
    return path


def save_sequence(
    frames: Sequence[np.ndarray], directory: PathLike, pattern: str = FRAME_PATTERN
) -> List[Path]:
    """Write frames as numbered images in a directory."""
    directory = Path(directory)
    return [save_image(f, directory / pattern.format(i)) for i, f in enumerate(frames)]
