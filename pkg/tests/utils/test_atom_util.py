# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the Atom utility functions and HasConfigAtom object.

"""
import pytest
from atom.api import Constant, Enum, Float, Int, List, Str, Tuple, Typed, Value

from fitvnet.errors import ConfigError
from fitvnet.utils.atom_util import (
    HasConfigAtom,
    member_from_config,
    member_to_config,
    tagged_members,
)


def _pair_to_config(obj, member, value):
    return list(value)


def _pair_from_config(obj, member, value):
    return tuple(value)


class _Aaux(HasConfigAtom):

    int_ = Int().tag(config=True)


class _Faux(HasConfigAtom):

    int_ = Int().tag(config=False)


class _Aux(HasConfigAtom):

    string = Str().tag(config=True)
    float_n = Float().tag(config=True)
    enum = Enum("a", "b").tag(config=True)
    enum_float = Enum(1.0, 2.0).tag(config=True)
    list_ = List(Float()).tag(config=True)
    pair = Tuple(int, default=(1, 2)).tag(
        config=(_pair_to_config, _pair_from_config)
    )
    value = Value().tag(config=True)
    const = Constant("r").tag(config=True)

    atom = Typed(_Aaux).tag(config=True)

    no_tag = Int()

    def _default_atom(self):
        return _Aaux()


def test_invalid_config_tag():
    aux = _Faux()
    with pytest.raises(ConfigError):
        member_from_config(aux, aux.get_member("int_"), 1)
    with pytest.raises(ConfigError):
        member_to_config(aux, aux.get_member("int_"), 1)


def test_tagged_members1():
    aux = _Aux()
    members = sorted(tagged_members(aux, "config").keys())
    test = sorted(
        [
            "string",
            "float_n",
            "enum",
            "enum_float",
            "list_",
            "pair",
            "atom",
            "value",
            "const",
        ]
    )
    assert members == test


def test_tagged_members2():
    aux = _Faux()
    assert list(tagged_members(aux, "config", True)) == []
    assert list(tagged_members(aux, "config", False)) == ["int_"]


def test_tagged_members3():
    aux = _Aux()
    members = sorted(tagged_members(aux).keys())
    assert "no_tag" in members
    assert len(members) == 10


def test_member_from_config_identity():
    aux = _Aux()
    assert member_from_config(aux, aux.get_member("string"), "a") == "a"
    assert member_from_config(aux, aux.get_member("float_n"), 1.0) == 1.0
    assert member_from_config(aux, aux.get_member("list_"), [1.0, 2.0]) == [1.0, 2.0]


def test_member_converters():
    aux = _Aux()
    member = aux.get_member("pair")
    assert member_to_config(aux, member, (3, 4)) == [3, 4]
    assert member_from_config(aux, member, [3, 4]) == (3, 4)


def test_update_members_from_config():
    aux = _Aux()
    config = {
        "float_n": 1.0,
        "enum": "b",
        "enum_float": 2.0,
        "list_": [2.0, 5.0],
        "pair": [5, 6],
        "atom": {"int_": 2},
        "const": "r",
    }
    aux.update_members_from_config(config)
    assert aux.float_n == 1.0
    assert aux.enum == "b"
    assert aux.enum_float == 2.0
    assert aux.list_ == [2.0, 5.0]
    assert aux.pair == (5, 6)
    assert aux.atom.int_ == 2
    assert aux.const == "r"


def test_update_members_rejects_bad_values():
    aux = _Aux()
    with pytest.raises(ConfigError):
        aux.update_members_from_config({"enum": "c"})


def test_update_members_rejects_unknown_keys():
    aux = _Aux()
    with pytest.raises(ConfigError) as e:
        aux.update_members_from_config({"flaot_n": 1.0, "no_tag": 2})
    assert "flaot_n" in str(e.value)
    assert "no_tag" in str(e.value)


def test_config_from_members():
    aux = _Aux()
    config = aux.config_from_members()
    assert config["string"] == ""
    assert config["float_n"] == 0.0
    assert config["enum"] == "a"
    assert config["enum_float"] == 1.0
    assert config["list_"] == []
    assert config["pair"] == [1, 2]
    assert config["atom"] == {"int_": 0}
    assert "no_tag" not in config
