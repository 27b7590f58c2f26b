# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Test the background batch preparation.

"""
import threading
import time

import pytest

from fitvnet.training.prefetch import BatchPrefetcher, iterate_prepared


@pytest.mark.parametrize("depth", [0, 1, 3])
def test_order_is_preserved(depth):
    def prepare(index, item):
        # Later items are faster to prepare.
        time.sleep(0.001 * (5 - item))
        return item * 10

    out = list(iterate_prepared(range(5), prepare, depth))
    assert out == [(i, i * 10) for i in range(5)]


def test_preparation_runs_in_a_thread():
    threads = set()

    def prepare(index, item):
        threads.add(threading.current_thread().name)
        return item

    list(iterate_prepared(range(3), prepare, 2))
    assert threads == {"fitvnet-prefetch"}


def test_errors_are_reraised():
    def prepare(index, item):
        if index == 2:
            raise ValueError("bad batch")
        return item

    seen = []
    with pytest.raises(ValueError, match="bad batch"):
        for _, item in iterate_prepared(range(5), prepare, 2):
            seen.append(item)
    assert seen == [0, 1]


@pytest.mark.timeout(10)
def test_early_stop_releases_the_thread():
    prefetcher = BatchPrefetcher(range(1000), lambda i, item: item, depth=1)
    for item in prefetcher:
        if item == 3:
            break
    prefetcher.join(5)
    assert not prefetcher.is_alive()
