# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""FITVNet is a two-stage video denoiser built on a small numpy autodiff core.

A per-frame spatial denoiser first cleans every frame of a five frame window,
then two cascaded spatiotemporal blocks fuse the pre-denoised frames into the
final estimate of the centre frame.

"""
try:
    from ._version import __version__
except ImportError:  # pragma: no cover
    __version__ = "0.0.0"
