# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test corpus manifests.

"""
import json

import numpy as np
import pytest

from fitvnet.data.manifest import (
    ManifestEntry,
    SequenceManifest,
    append_manifest_entry,
    describe_directory,
    read_manifest,
    scan_manifest,
    write_manifest,
)
from fitvnet.data.sequence import save_sequence
from fitvnet.errors import DataError
from fitvnet.utils.error_collector import ErrorCollector


def test_entry_dict_conversion():
    entry = ManifestEntry(id="a", dir="seq/a", frames=7, h=64, w=96)
    assert entry.to_dict() == {"id": "a", "dir": "seq/a", "frames": 7, "h": 64, "w": 96}
    assert ManifestEntry.from_dict(entry.to_dict()).to_dict() == entry.to_dict()
    with pytest.raises(DataError):
        ManifestEntry.from_dict({"id": "a", "dir": "seq/a"})


def test_describe_directory(frames_dir):
    entry = describe_directory("clean", frames_dir)
    assert (entry.frames, entry.h, entry.w) == (7, 64, 64)
    with pytest.raises(DataError):
        describe_directory("empty", frames_dir.parent)


def test_read_write(tmp_path):
    entries = [
        ManifestEntry(id="a", dir="a", frames=5, h=32, w=32),
        ManifestEntry(id="b", dir="/abs/b", frames=6, h=32, w=64),
    ]
    path = write_manifest(entries, tmp_path / "corpus" / "manifest.jsonl")
    append_manifest_entry(ManifestEntry(id="c", dir="c", frames=5, h=32, w=32), path)
    with open(path, "a") as f:
        f.write("\n")

    manifest = read_manifest(path)
    assert [e.id for e in manifest.entries] == ["a", "b", "c"]
    assert manifest.root == tmp_path / "corpus"
    assert manifest.directory(manifest.entries[0]) == tmp_path / "corpus" / "a"
    assert str(manifest.directory(manifest.entries[1])) == "/abs/b"
    assert json.loads(path.read_text().splitlines()[0])["id"] == "a"


def test_read_errors(tmp_path):
    with pytest.raises(DataError):
        read_manifest(tmp_path / "missing.jsonl")
    path = tmp_path / "bad.jsonl"
    path.write_text('{"id": "a"\n')
    with pytest.raises(DataError):
        read_manifest(path)


def test_scan(tmp_path):
    frames = [np.zeros((3, 32, 32))] * 5
    save_sequence(frames, tmp_path / "good")
    save_sequence(frames[:3], tmp_path / "short")
    save_sequence(frames[:4], tmp_path / "wrong")
    manifest = SequenceManifest(
        root=tmp_path,
        entries=[
            ManifestEntry(id="good", dir="good", frames=5, h=32, w=32),
            ManifestEntry(id="short", dir="short", frames=3, h=32, w=32),
            ManifestEntry(id="wrong", dir="wrong", frames=5, h=32, w=32),
            ManifestEntry(id="gone", dir="gone", frames=5, h=32, w=32),
        ],
    )
    collector = ErrorCollector()
    usable = scan_manifest(manifest, collector, min_frames=5)
    assert [e.id for e in usable] == ["good"]
    summary = collector.summary()
    assert [p["id"] for p in summary["skipped"]] == ["short"]
    assert [p["id"] for p in summary["mismatch"]] == ["wrong"]
    assert [p["id"] for p in summary["missing"]] == ["gone"]
    assert collector.has_errors


@pytest.mark.parametrize("h, w", [(32, 48), (48, 32), (16, 16)])
def test_scan_rejects_wrong_frame_size(tmp_path, h, w):
    save_sequence([np.zeros((3, 32, 48))] * 5, tmp_path / "seq")
    manifest = SequenceManifest(
        root=tmp_path,
        entries=[ManifestEntry(id="seq", dir="seq", frames=5, h=h, w=w)],
    )
    collector = ErrorCollector()
    usable = scan_manifest(manifest, collector, min_frames=5)
    if (h, w) == (32, 48):
        assert [e.id for e in usable] == ["seq"]
        assert not collector.has_errors
    else:
        assert usable == []
        (problem,) = collector.summary()["mismatch"]
        assert problem["id"] == "seq"
        assert "32x48" in problem["message"]
        assert collector.has_errors


def test_scan_reports_unreadable_frames(tmp_path):
    directory = tmp_path / "seq"
    directory.mkdir()
    for i in range(5):
        (directory / f"{i:05d}.png").write_bytes(b"not an image")
    manifest = SequenceManifest(
        root=tmp_path,
        entries=[ManifestEntry(id="seq", dir="seq", frames=5, h=32, w=32)],
    )
    collector = ErrorCollector()
    assert scan_manifest(manifest, collector, min_frames=5) == []
    assert [p["id"] for p in collector.summary()["unreadable"]] == ["seq"]


def test_scan_short_sequences_are_warnings(tmp_path):
    save_sequence([np.zeros((3, 32, 32))] * 3, tmp_path / "short")
    manifest = SequenceManifest(
        root=tmp_path,
        entries=[ManifestEntry(id="short", dir="short", frames=3, h=32, w=32)],
    )
    collector = ErrorCollector()
    assert scan_manifest(manifest, collector, min_frames=5) == []
    assert not collector.has_errors
