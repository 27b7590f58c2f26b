# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Object centralizing the problems met while processing a corpus.

Scanning a manifest or a directory of frames can surface many independent
problems. Rather than stopping on the first one, commands signal them to an
ErrorCollector which logs them and keeps a summary used to decide the exit
status.

"""
import logging
from collections import defaultdict
from pprint import pformat
from typing import Any, Dict, List, Mapping

from atom.api import Atom, Int, Typed

logger = logging.getLogger(__name__)

#: Kinds of problems that do not make a command fail.
WARNING_KINDS = ("skipped",)


class ErrorCollector(Atom):
    """Collect the errors and warnings signaled while running a command.

    It will always log the problems. In gathering mode the logging is
    deferred until the mode is exited so that related problems are reported
    together.

    """

    #: Problems signaled so far, grouped by kind.
    problems = Typed(defaultdict, (list,))

    def signal(self, kind: str, **infos: Any) -> None:
        """Signal a problem occured.

        Parameters
        ----------
        kind : str
            Kind of problem. Kinds listed in WARNING_KINDS are warnings, any
            other kind is an error.

        **infos :
            Description of the problem, a ``message`` entry is expected.

        """
        self.problems[kind].append(infos)
        if self._gathering_counter:
            self._delayed[kind].append(infos)
            return

        self._log(kind, [infos])

    def enter_gathering(self) -> None:
        """In gathering mode, reporting is differed till exiting the mode."""
        self._gathering_counter += 1

    def exit_gathering(self) -> None:
        """Upon leaving gathering mode, problems are logged.

        As the gathering mode can be requested many times, the problems are
        only logged when this method has been called as many times as its
        counterpart.

        """
        self._gathering_counter -= 1
        if self._gathering_counter < 1:
            self._gathering_counter = 0
            delayed = dict(self._delayed)
            self._delayed.clear()
            for kind, infos in delayed.items():
                self._log(kind, infos)

    @property
    def has_errors(self) -> bool:
        """Whether a problem that is not a warning was signaled."""
        return any(k not in WARNING_KINDS and v for k, v in self.problems.items())

    def summary(self) -> Dict[str, List[Mapping[str, Any]]]:
        """Copy of the signaled problems grouped by kind."""
        return {k: list(v) for k, v in self.problems.items() if v}

    # =========================================================================
    # --- Private API ---------------------------------------------------------
    # =========================================================================

    #: Counter keeping track of how many times the gathering mode was entered
    #: the mode is exited only when the value reaches 0.
    _gathering_counter = Int()

    #: Problems received while the gathering mode was active.
    _delayed = Typed(defaultdict, (list,))

    def _log(self, kind: str, infos: List[Mapping[str, Any]]) -> None:
        """Log a group of problems of the same kind."""
        log = logger.warning if kind in WARNING_KINDS else logger.error
        for info in infos:
            message = info.get("message")
            if message is None:
                message = pformat(dict(info))
            log("%s: %s", kind, message)
