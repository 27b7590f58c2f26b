# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Exceptions raised by fitvnet.

All exceptions derive from FitvError so that the command line can report them
uniformly. Most also derive from the builtin exception a caller would expect
(ValueError for bad shapes or settings, OSError for unreadable data).

"""


class FitvError(Exception):
    """Base class for all fitvnet errors."""


class ShapeError(FitvError, ValueError):
    """A tensor or image does not have the shape an operation requires."""


class ConfigError(FitvError, ValueError):
    """A configuration value is invalid or inconsistent."""


class NoiseSpecError(ConfigError):
    """A noise description is invalid."""


class DataError(FitvError, OSError):
    """Frames or manifests on disk cannot be used."""


class CheckpointError(FitvError, ValueError):
    """A checkpoint file is corrupted or does not match the architecture."""


class GradCheckError(FitvError):
    """A gradient check encountered non finite values."""


class GraphError(FitvError, ValueError):
    """The autodiff graph is used in a way an operation does not allow."""
