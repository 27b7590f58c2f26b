# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Tools to build the command line parser out of independently declared commands.

"""
from argparse import ArgumentParser, ArgumentTypeError, Namespace
from typing import Any, Callable, Optional, Tuple

from atom.api import Atom, Callable as ACallable, Dict, List, Str, Value


class ArgParser(Atom):
    """Wrapper class around argparse.ArgumentParser.

    This class allow to defer the actual creation of the parser so that
    commands can be declared one after the other and choices can be extended
    with aliases before the real parser is created.

    """

    #: Name of the application or of the command.
    app_name = Str()

    #: Short description displayed in the help.
    description = Str()

    #: Function running the command, receives the parsed namespace.
    handler = ACallable()

    #: Mapping between a name passed to the "choices" arguments of
    #: add_argument and the accepted values, aliases included.
    choices = Dict()

    def parse_args(self, args: Optional[list] = None) -> Namespace:
        """Parse the arguments.

        By default the arguments passed on the command line are parsed. The
        handler of the selected command is stored under ``handler``.

        """
        if not self._parser:
            self._init_parser()
        parsed = self._parser.parse_args(args)

        # Resolve choices.
        mapping = dict(self._arg_to_choices)
        for command in self._commands:
            mapping.update(command._arg_to_choices)
        for k, v in vars(parsed).items():
            if k in mapping and v is not None:
                setattr(parsed, k, mapping[k][v])

        return parsed

    def add_argument(self, *args, **kwargs) -> None:
        """Add an argument to the parser.

        See argparse documentation for the accepted arguments and their
        meaning.

        """
        if not args[0].startswith("-"):
            raise ValueError(f"Only optional arguments can be added to {self.app_name}")

        arg_name = kwargs.get("dest") or args[-1].lstrip("-").replace("-", "_")

        if "choices" in kwargs and kwargs["choices"] in self.choices:
            kwargs["choices"] = self.choices[kwargs["choices"]]
            self._arg_to_choices[arg_name] = kwargs["choices"]
        self._arguments.append((args, kwargs))

    def add_choice(self, kind: str, value: str, alias: Optional[str] = None) -> None:
        """Add a possible value for a choice.

        Parameters
        ----------
        kind : str
            Choice id to which to add the proposed value.

        value : str
            New possible value to add to the list of possible value.

        alias : str | None
            Short name to give to the choice. If the chosen one is in conflict
            with an existing name it is ignored.

        """
        if kind not in self.choices:
            self.choices[kind] = {}

        ch = self.choices[kind]
        ch[value] = value
        if alias and alias not in ch:
            ch[alias] = value

    def add_command(
        self, name: str, description: str, handler: Callable[[Namespace], Any]
    ) -> "ArgParser":
        """Declare a sub-command sharing the choices of this parser."""
        command = ArgParser(
            app_name=name,
            description=description,
            handler=handler,
            choices=self.choices,
        )
        self._commands.append(command)
        return command

    # --- Private API ---------------------------------------------------------

    # Cached value of the argparser.ArgumentParser instance created by
    # _init_parser.
    _parser = Value()

    # List of tuple to use to create arguments.
    _arguments = List()

    # Commands declared through add_command.
    _commands = List()

    #: Mapping between argument and associated choices.
    #: Used to resolve choices.
    _arg_to_choices = Dict()

    def _init_parser(self, parser: Optional[ArgumentParser] = None) -> None:
        """Initialize the underlying argparse.ArgumentParser."""
        if not self._parser:
            self._parser = parser or ArgumentParser(
                prog=self.app_name, description=self.description
            )

        for args, kwargs in self._arguments:
            self._parser.add_argument(*args, **kwargs)

        if self._commands:
            subparsers = self._parser.add_subparsers(dest="command", required=True)
            for command in self._commands:
                sub = subparsers.add_parser(
                    command.app_name,
                    help=command.description,
                    description=command.description,
                )
                sub.set_defaults(handler=command.handler)
                command._init_parser(sub)


def int_pair(separator: str) -> Callable[[str], Tuple[int, int]]:
    """Argument type parsing two integers such as "64x96" or "2,0"."""

    def parse(text: str) -> Tuple[int, int]:
        a, b = _split(text, separator)
        try:
            return int(a), int(b)
        except ValueError:
            raise ArgumentTypeError(f"expected two integers, got {text!r}") from None

    return parse


def float_pair(text: str) -> Tuple[float, float]:
    """Argument type parsing "LO,HI"."""
    a, b = _split(text, ",")
    try:
        return float(a), float(b)
    except ValueError:
        raise ArgumentTypeError(f"expected two numbers, got {text!r}") from None


def float_list(text: str) -> Tuple[float, ...]:
    """Argument type parsing a comma separated list of numbers."""
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ArgumentTypeError(f"expected numbers, got {text!r}") from None
    if not values:
        raise ArgumentTypeError("expected at least one number")
    return values


def _split(text: str, separator: str) -> Tuple[str, str]:
    parts = text.lower().split(separator)
    if len(parts) != 2:
        raise ArgumentTypeError(f"expected two values separated by {separator!r}")
    return parts[0], parts[1]
