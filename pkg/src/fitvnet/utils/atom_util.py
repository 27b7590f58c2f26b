# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Tools to work with Atom tagged members and to automatize configuration handling.

Configurable records tag their members with ``config=True`` (plain values
handled by the TOML layer) or with a ``(to_config, from_config)`` pair of
converters taking ``(obj, member, value)``.

"""
from collections import OrderedDict
from inspect import getfullargspec
from typing import Any, Dict, Optional

from atom.api import Atom, Constant, Member

from ..errors import ConfigError

# String identifying the configuration tag
CONFIG_KEY = "config"

# Position in the tag tuple of the to config and from config converters
TO_CONFIG_ID = 0
FROM_CONFIG_ID = 1


def tagged_members(
    obj: Atom, meta: Optional[str] = None, meta_value: Any = None
) -> Dict[str, Member]:
    """Utility function to retrieve tagged members from an object

    Parameters
    ----------
    obj : Atom
        Object from which the tagged members should be retrieved.

    meta : str, optional
        The tag to look for, only member which has this tag will be returned

    meta_value : optional
        The value of the metadata used for filtering the members returned

    Returns
    -------
    tagged_members : dict(str, Member)
        Dictionary of the members whose metadatas corresponds to the predicate

    """
    members = obj.members()
    if meta is None and meta_value is None:
        return members
    elif meta_value is None:
        return {
            key: member
            for key, member in members.items()
            if member.metadata is not None and meta in member.metadata
        }
    else:
        return {
            key: member
            for key, member in members.items()
            if member.metadata is not None
            and meta in member.metadata
            and member.metadata[meta] == meta_value
        }


def _converter(obj: Atom, member: Member, position: int):
    """Extract a converter from the config tag, None meaning identity."""
    meta_value = member.metadata[CONFIG_KEY]
    if meta_value is True:
        return None
    if isinstance(meta_value, (tuple, list)) and len(meta_value) == 2:
        converter = meta_value[position]
        if converter is not None and len(getfullargspec(converter)[0]) != 3:
            raise ConfigError(
                f"Config converter of {type(obj).__name__}.{member.name} is expected "
                f"to take 3 parameters, it takes {len(getfullargspec(converter)[0])}."
            )
        return converter
    raise ConfigError(
        f"The config tag of {type(obj).__name__}.{member.name} must be True or a "
        "(to_config, from_config) pair of converters."
    )


def member_from_config(obj: Atom, member: Member, val: Any) -> Any:
    """Convert the value read from a configuration file for a member."""
    converter = _converter(obj, member, FROM_CONFIG_ID)
    return val if converter is None else converter(obj, member, val)


def member_to_config(obj: Atom, member: Member, val: Any) -> Any:
    """Provide the value that will be stored in a configuration file for a member."""
    converter = _converter(obj, member, TO_CONFIG_ID)
    return val if converter is None else converter(obj, member, val)


class HasConfigAtom(Atom):
    """Base class for Atom object that can be configured from a mapping.

    This class defines the basic functions used to build a dict from
    the member values and to update the members from such a dict.

    """

    def config_from_members(self) -> OrderedDict:
        """Get the members values as a mapping suitable for a TOML file."""
        config = OrderedDict()
        for name, member in tagged_members(self, CONFIG_KEY).items():
            value = getattr(self, name)
            if isinstance(value, HasConfigAtom):
                config[name] = value.config_from_members()
            else:
                config[name] = member_to_config(self, member, value)
        return config

    def update_members_from_config(self, parameters: dict) -> None:
        """Use the values given in the parameters to update the members

        This function will call itself on any tagged HasConfigAtom member.
        Unknown keys are rejected so that typos in configuration files do not
        go unnoticed.

        """
        members = tagged_members(self, CONFIG_KEY)
        unknown = set(parameters) - set(members)
        if unknown:
            raise ConfigError(
                f"Unknown {type(self).__name__} settings: {', '.join(sorted(unknown))}"
            )

        for name, member in members.items():
            if name not in parameters or isinstance(member, Constant):
                continue

            old_val = getattr(self, name)
            if isinstance(old_val, HasConfigAtom):
                old_val.update_members_from_config(parameters[name])
            else:
                converted = member_from_config(self, member, parameters[name])
                try:
                    setattr(self, name, converted)
                except Exception as e:
                    msg = "An exception occured when trying to set {} to {}"
                    raise ConfigError(msg.format(name, converted)) from e
