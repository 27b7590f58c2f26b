# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Per-frame and corpus level metrics reports.

A report serializes to a UTF-8 JSON document holding a ``rows`` array, a
``corpus`` object and a ``provenance`` object, and renders as an aligned
plain-text table.

"""
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Union

import numpy as np
from atom.api import Atom, Dict as ADict, Float, Int, List as AList, Str, Typed

from ..errors import DataError
from .deviation import ad_stats


class MetricsRow(Atom):
    """Metrics of one frame."""

    #: Identifier of the frame.
    frame_id = Str()

    #: PSNR in dB.
    psnr = Float()

    #: SSIM.
    ssim = Float()

    #: Average deviation index.
    ad = Float()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "frame": self.frame_id,
            "psnr": self.psnr,
            "ssim": self.ssim,
            "ad": self.ad,
        }


class CorpusStats(Atom):
    """Aggregates of the rows of a report."""

    psnr_mean = Float()
    ssim_mean = Float()
    ad_avg = Float()
    ad_max = Float()

    #: Number of rows whose ad is strictly above ad_avg.
    ad_count = Int()

    @classmethod
    def from_rows(cls, rows: Sequence[MetricsRow]) -> "CorpusStats":
        if not rows:
            return cls()
        ad_avg, ad_max, ad_count = ad_stats([r.ad for r in rows])
        return cls(
            psnr_mean=float(np.mean([r.psnr for r in rows])),
            ssim_mean=float(np.mean([r.ssim for r in rows])),
            ad_avg=ad_avg,
            ad_max=ad_max,
            ad_count=ad_count,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "psnr_mean": self.psnr_mean,
            "ssim_mean": self.ssim_mean,
            "ad_avg": self.ad_avg,
            "ad_max": self.ad_max,
            "ad_count": self.ad_count,
        }


class MetricsReport(Atom):
    """Rows of per-frame metrics with their corpus aggregates."""

    #: One row per evaluated frame.
    rows = AList(MetricsRow)

    #: Aggregates, always recomputed from the rows.
    corpus = Typed(CorpusStats, ())

    #: Where the evaluated frames come from (directories, checkpoint, ...).
    provenance = ADict(str, str)

    @classmethod
    def from_rows(
        cls,
        rows: Iterable[MetricsRow],
        provenance: Optional[Mapping[str, Any]] = None,
    ) -> "MetricsReport":
        rows = list(rows)
        return cls(
            rows=rows,
            corpus=CorpusStats.from_rows(rows),
            provenance={k: str(v) for k, v in (provenance or {}).items()},
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "corpus": self.corpus.to_dict(),
            "provenance": dict(self.provenance),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False)

    @classmethod
    def from_json(cls, text: str) -> "MetricsReport":
        """Read a report, the corpus aggregates are recomputed from the rows."""
        try:
            data = json.loads(text)
            rows = [
                MetricsRow(
                    frame_id=str(r["frame"]),
                    psnr=float(r["psnr"]),
                    ssim=float(r["ssim"]),
                    ad=float(r["ad"]),
                )
                for r in data["rows"]
            ]
        except (KeyError, TypeError, ValueError) as e:
            raise DataError(f"Invalid metrics report: {e}") from e
        return cls.from_rows(rows, data.get("provenance"))

    def write(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path

    def format_table(self) -> str:
        """Aligned table of the rows followed by the corpus aggregates."""
        header = ("frame", "PSNR (dB)", "SSIM", "AD")
        lines = [
            (r.frame_id, f"{r.psnr:.3f}", f"{r.ssim:.4f}", f"{r.ad:.5f}")
            for r in self.rows
        ]
        c = self.corpus
        footer = [
            ("mean", f"{c.psnr_mean:.3f}", f"{c.ssim_mean:.4f}", f"{c.ad_avg:.5f}"),
            ("AD max / #AD", "", "", f"{c.ad_max:.5f} / {c.ad_count}"),
        ]
        return format_columns(header, lines, footer)


class BenchmarkRow(Atom):
    """Quality and speed of the denoiser at one noise level."""

    #: Noise level on the 0-255 scale.
    sigma255 = Float()

    #: Mean PSNR of the noisy centre frames.
    noisy_psnr = Float()

    #: Mean PSNR of the full pipeline.
    psnr = Float()

    #: Mean SSIM of the full pipeline.
    ssim = Float()

    #: Mean PSNR of the spatial denoiser alone.
    stage1_psnr = Float()

    #: Milliseconds per frame of the full pipeline.
    ms_full = Float()

    #: Milliseconds per frame of the spatial denoiser alone.
    ms_stage1 = Float()

    def to_dict(self) -> Dict[str, float]:
        return {
            name: getattr(self, name)
            for name in (
                "sigma255",
                "noisy_psnr",
                "psnr",
                "ssim",
                "stage1_psnr",
                "ms_full",
                "ms_stage1",
            )
        }


def format_benchmark(rows: Sequence[BenchmarkRow]) -> str:
    header = ("sigma", "noisy", "PSNR", "SSIM", "stage 1", "ms/frame", "stage 1 ms")
    lines = [
        (
            f"{r.sigma255:g}",
            f"{r.noisy_psnr:.2f}",
            f"{r.psnr:.2f}",
            f"{r.ssim:.4f}",
            f"{r.stage1_psnr:.2f}",
            f"{r.ms_full:.1f}",
            f"{r.ms_stage1:.1f}",
        )
        for r in rows
    ]
    return format_columns(header, lines)


def format_columns(
    header: Sequence[str],
    lines: Sequence[Sequence[str]],
    footer: Sequence[Sequence[str]] = (),
) -> str:
    """Left aligned first column, right aligned others, rules around the body."""
    table: List[Sequence[str]] = [header, *lines, *footer]
    widths = [max(len(row[i]) for row in table) for i in range(len(header))]

    def render(row: Sequence[str]) -> str:
        cells = [row[0].ljust(widths[0])]
        cells += [cell.rjust(width) for cell, width in zip(row[1:], widths[1:])]
        return "  ".join(cells).rstrip()

    rule = "-" * (sum(widths) + 2 * (len(widths) - 1))
    out = [render(header), rule, *(render(row) for row in lines)]
    if footer:
        out.append(rule)
        out += [render(row) for row in footer]
    return "\n".join(out)
