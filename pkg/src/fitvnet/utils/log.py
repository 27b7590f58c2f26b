# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""This module defines some tools to make easier the use of the logging module.

:Contains:
    DayRotatingTimeHandler
        File handler opening one numbered file per run and per day.
    configure_logging
        Install the handlers used by the command line, honouring FITV_LOG.

"""
import datetime
import logging
import os
import pathlib
from logging.handlers import TimedRotatingFileHandler
from typing import IO, Optional

#: Environment variable selecting the verbosity of the command line.
LOG_ENV = "FITV_LOG"

#: Accepted values of the FITV_LOG variable.
LOG_LEVELS = {
    "error": logging.ERROR,
    "warning": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}

#: Name of the package logger under which all module loggers live.
ROOT_LOGGER = "fitvnet"

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


class DayRotatingTimeHandler(TimedRotatingFileHandler):
    """File handler writing to ``<stem><date>_<n>.<ext>`` in a log directory.

    Starting the command line several times on the same day yields distinct
    numbered files instead of appending to (or renaming) a previous run log.
    At midnight a new file is opened, old files are never renamed.

    """

    def __init__(self, filename: str, mode: str = "w", **kwargs) -> None:
        self.mode = mode
        self.path = ""
        kwargs.setdefault("encoding", "utf-8")
        super().__init__(filename, when="MIDNIGHT", **kwargs)

    def _open(self) -> IO[str]:
        """Open the next free numbered file for today."""
        base = pathlib.Path(self.baseFilename)
        today = str(datetime.date.today())
        i = 0
        while (base.parent / f"{base.stem}{today}_{i}{base.suffix}").is_file():
            i += 1

        path = base.parent / f"{base.stem}{today}_{i}{base.suffix}"
        self.path = str(path)
        return open(path, self.mode, encoding=self.encoding)

    def doRollover(self) -> None:
        """Close the current file and open a new one, no renaming is performed."""
        if self.stream:
            self.stream.close()
        self.stream = self._open()

        current_time = int(datetime.datetime.now().timestamp())
        new_rollover_at = self.computeRollover(current_time)  # type: ignore
        while new_rollover_at <= current_time:
            new_rollover_at = new_rollover_at + self.interval  # type: ignore
        self.rolloverAt = new_rollover_at


def level_from_env(default: str = "info") -> int:
    """Resolve the logging level from the FITV_LOG environment variable.

    Unknown values fall back on the default level rather than failing: a
    misspelled verbosity should never prevent a run.

    """
    name = os.environ.get(LOG_ENV, default).strip().lower()
    return LOG_LEVELS.get(name, LOG_LEVELS[default])


def configure_logging(
    log_dir: Optional[str] = None, level: Optional[int] = None
) -> logging.Logger:
    """Install the console (and optional rotating file) handlers.

    Calling this function several times replaces the handlers installed by a
    previous call.

    Parameters
    ----------
    log_dir : str, optional
        Directory in which a DayRotatingTimeHandler writes ``fitvnet.log``
        files. Created if missing.

    level : int, optional
        Logging level, by default read from FITV_LOG.

    Returns
    -------
    logger : logging.Logger
        The package logger.

    """
    logger = logging.getLogger(ROOT_LOGGER)
    for handler in [h for h in logger.handlers if getattr(h, "_fitv", False)]:
        logger.removeHandler(handler)
        handler.close()

    logger.setLevel(level if level is not None else level_from_env())
    formatter = logging.Formatter(LOG_FORMAT)

    console = logging.StreamHandler()
    console.setFormatter(formatter)
    console._fitv = True  # type: ignore
    logger.addHandler(console)

    if log_dir:
        directory = pathlib.Path(log_dir)
        directory.mkdir(parents=True, exist_ok=True)
        rotating = DayRotatingTimeHandler(str(directory / "fitvnet.log"))
        rotating.setFormatter(formatter)
        rotating._fitv = True  # type: ignore
        logger.addHandler(rotating)

    return logger
