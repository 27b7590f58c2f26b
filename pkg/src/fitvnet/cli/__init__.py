# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Command line interface.

"""
from .main import build_parser, main

__all__ = ["build_parser", "main"]
