# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Seeded synthesis of Gaussian and impulse noise, and the noise level maps.

Import from the submodules: fitvnet.noise.spec and fitvnet.noise.synthesis.

"""
