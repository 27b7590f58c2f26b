# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the error collector.

"""
import logging

from fitvnet.utils.error_collector import ErrorCollector


def test_signal_logs_immediately(caplog):
    collector = ErrorCollector()
    collector.signal("missing", message="seq_a not found")
    assert [r.levelno for r in caplog.records] == [logging.ERROR]
    assert "seq_a not found" in caplog.text
    assert collector.has_errors


def test_warnings_do_not_count_as_errors(caplog):
    collector = ErrorCollector()
    collector.signal("skipped", message="too short")
    assert [r.levelno for r in caplog.records] == [logging.WARNING]
    assert not collector.has_errors
    assert collector.summary() == {"skipped": [{"message": "too short"}]}


def test_message_less_signal(caplog):
    collector = ErrorCollector()
    collector.signal("mismatch", id="b", frames=3)
    assert "frames" in caplog.text


def test_gathering(caplog):
    """Problems are logged only when the outermost gathering mode is left."""
    collector = ErrorCollector()
    collector.enter_gathering()
    collector.enter_gathering()
    collector.signal("missing", message="a")
    collector.signal("skipped", message="b")
    collector.exit_gathering()
    assert not caplog.records

    collector.exit_gathering()
    assert sorted(r.message for r in caplog.records) == ["missing: a", "skipped: b"]
    assert collector.has_errors

    # Extra exits do not break the mode.
    collector.exit_gathering()
    collector.signal("skipped", message="c")
    assert len(caplog.records) == 3
