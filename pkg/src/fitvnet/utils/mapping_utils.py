# -----------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see AUTHORS for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# -----------------------------------------------------------------------------
"""Mapping related utility functions.

"""
from collections.abc import Mapping, MutableMapping
from typing import Any


def recursive_update(to_update: MutableMapping, data: Mapping) -> MutableMapping:
    """Update a dictionary and all the mapping found as values.

    Used to layer configuration sources: defaults, then a TOML file, then the
    flags explicitly passed on the command line.

    Parameters
    ----------
    to_update : MutableMapping
        Mapping whose content should be updated.

    data : Mapping
        Mapping to use from which to pull new values.

    Returns
    -------
    to_update : MutableMapping
        The updated mapping, returned for chaining.

    """
    for k, v in data.items():
        if isinstance(v, Mapping):
            if not isinstance(to_update.get(k), MutableMapping):
                to_update[k] = {}
            recursive_update(to_update[k], v)
        else:
            to_update[k] = v
    return to_update


def plain_dict(mapping: Mapping) -> dict:
    """Convert nested mappings (OrderedDict, ...) into plain dicts.

    rtoml only serializes builtin dicts and lists, tuples are turned into
    lists on the way.

    """
    out: dict = {}
    for k, v in mapping.items():
        out[k] = _plain(v)
    return out


def _plain(value: Any) -> Any:
    if isinstance(value, Mapping):
        return plain_dict(value)
    if isinstance(value, (tuple, list)):
        return [_plain(v) for v in value]
    return value
