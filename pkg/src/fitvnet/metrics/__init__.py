# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Image quality metrics and the reports aggregating them.

"""
from .deviation import (
    AD_PATCH,
    ad_bounding_boxes,
    ad_index,
    ad_stats,
    patch_deviations,
)
from .edges import sobel_magnitude
from .quality import PSNR_CAP, psnr, ssim
from .report import (
    BenchmarkRow,
    CorpusStats,
    MetricsReport,
    MetricsRow,
    format_benchmark,
)

__all__ = [
    "AD_PATCH",
    "PSNR_CAP",
    "BenchmarkRow",
    "CorpusStats",
    "MetricsReport",
    "MetricsRow",
    "ad_bounding_boxes",
    "ad_index",
    "ad_stats",
    "format_benchmark",
    "patch_deviations",
    "psnr",
    "sobel_magnitude",
    "ssim",
]
