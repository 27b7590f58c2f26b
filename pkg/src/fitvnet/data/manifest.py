# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Corpus manifests: one JSON object per line describing a sequence directory.

Relative directories are resolved against the folder holding the manifest.

"""
import json
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Tuple, Union

from atom.api import Atom, Int, List as AList, Str, Typed

from ..errors import DataError
from ..utils.error_collector import ErrorCollector
from .sequence import list_frame_files, load_image

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

#: Keys of a manifest line, in writing order.
ENTRY_KEYS = ("id", "dir", "frames", "h", "w")


class ManifestEntry(Atom):
    """One sequence of a corpus."""

    #: Identifier of the sequence.
    id = Str()

    #: Directory holding the frames, as written in the manifest.
    dir = Str()

    #: Number of frames.
    frames = Int()

    #: Frame height.
    h = Int()

    #: Frame width.
    w = Int()

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in ENTRY_KEYS}

    @classmethod
    def from_dict(cls, data: dict) -> "ManifestEntry":
        missing = [k for k in ENTRY_KEYS if k not in data]
        if missing:
            raise DataError(f"Manifest entry {data} lacks {', '.join(missing)}")
        return cls(
            id=str(data["id"]),
            dir=str(data["dir"]),
            frames=int(data["frames"]),
            h=int(data["h"]),
            w=int(data["w"]),
        )


class SequenceManifest(Atom):
    """Entries of a corpus and the location they are relative to."""

    #: Sequences of the corpus.
    entries = AList(ManifestEntry)

    #: Folder against which relative directories are resolved.
    root = Typed(Path, factory=Path.cwd)

    def directory(self, entry: ManifestEntry) -> Path:
        path = Path(entry.dir)
        return path if path.is_absolute() else self.root / path

    def __len__(self) -> int:
        return len(self.entries)


def describe_directory(seq_id: str, directory: PathLike) -> ManifestEntry:
    """Build the entry of a sequence directory by reading its first frame."""
    files = list_frame_files(directory)
    if not files:
        raise DataError(f"No frame found in {directory}")
    _, h, w = load_image(files[0]).shape
    return ManifestEntry(id=seq_id, dir=str(directory), frames=len(files), h=h, w=w)


def read_manifest(path: PathLike) -> SequenceManifest:
    """Parse a JSON lines manifest, blank lines are ignored."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"Cannot read manifest {path}: {e}") from e
    entries = []
    for number, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            entries.append(ManifestEntry.from_dict(json.loads(line)))
        except json.JSONDecodeError as e:
            raise DataError(f"{path}:{number} is not valid JSON: {e}") from e
    return SequenceManifest(entries=entries, root=path.parent)


def write_manifest(entries: Iterable[ManifestEntry], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [json.dumps(e.to_dict()) for e in entries]
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


def append_manifest_entry(entry: ManifestEntry, path: PathLike) -> Path:
    """Add an entry at the end of a manifest, creating it if needed."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "a", encoding="utf-8") as f:
        f.write(json.dumps(entry.to_dict()) + "\n")
    return path


def scan_manifest(
    manifest: SequenceManifest,
    collector: Optional[ErrorCollector] = None,
    min_frames: int = 1,
) -> List[ManifestEntry]:
    """Entries whose directory matches the manifest description.

    Missing directories, frame count mismatches, first frames that cannot be
    decoded ("unreadable") and recorded h/w differing from the size of the
    first frame are signaled as errors, sequences shorter than min_frames as
    warnings (kind "skipped").
    Problems are gathered and logged once the scan is complete.

    """
    collector = collector if collector is not None else ErrorCollector()
    usable = []
    collector.enter_gathering()
    try:
        for entry in manifest.entries:
            directory = manifest.directory(entry)
            if not directory.is_dir():
                collector.signal(
                    "missing", id=entry.id, message=f"{entry.id}: {directory} not found"
                )
                continue
            files = list_frame_files(directory)
            if len(files) != entry.frames:
                collector.signal(
                    "mismatch",
                    id=entry.id,
                    message=(
                        f"{entry.id}: {len(files)} frames found, "
                        f"{entry.frames} listed"
                    ),
                )
                continue
            if entry.frames < min_frames:
                collector.signal(
                    "skipped",
                    id=entry.id,
                    message=(
                        f"{entry.id}: {entry.frames} frames, at least "
                        f"{min_frames} are needed"
                    ),
                )
                continue
            problem = _size_problem(entry, files)
            if problem:
                collector.signal(problem[0], id=entry.id, message=problem[1])
                continue
            usable.append(entry)
    finally:
        collector.exit_gathering()
    logger.info("%d/%d manifest entries usable", len(usable), len(manifest.entries))
    return usable


# =============================================================================
# --- Private API -------------------------------------------------------------
# =============================================================================


def _size_problem(
    entry: ManifestEntry, files: List[Path]
) -> Optional[Tuple[str, str]]:
    """Kind and message of a size problem of the first frame, if any."""
    if not files:
        return None
    try:
        _, h, w = load_image(files[0]).shape
    except DataError as e:
        return "unreadable", f"{entry.id}: {e}"
    if (h, w) != (entry.h, entry.w):
        return "mismatch", (
            f"{entry.id}: frames are {h}x{w}, {entry.h}x{entry.w} listed"
        )
    return None
