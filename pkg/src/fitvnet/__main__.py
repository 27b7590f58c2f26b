# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Allow ``python -m fitvnet``.

"""
import sys

from .cli.main import main

sys.exit(main())
