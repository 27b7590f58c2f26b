# --------------------------------------------------------------------------------------
# Copyright 2024 by FITVNet Authors, see git history for more details.
#
# Distributed under the terms of the BSD license.
#
# The full license is in the file LICENCE, distributed with this software.
# --------------------------------------------------------------------------------------
"""Background preparation of training batches.

"""
import logging
import queue
from threading import Thread
from typing import Any, Callable, Iterable, Iterator, Tuple

logger = logging.getLogger(__name__)

#: Marker put in the queue once every batch was produced.
_DONE = object()


class _Failure:
    """Exception raised while preparing a batch, re-raised by the consumer."""

    def __init__(self, error: BaseException) -> None:
        self.error = error


class BatchPrefetcher(Thread):
    """Prepare batches in a thread, handing them over through a bounded queue.

    Batches are produced and consumed in the order of the source. The
    preparation function receives the position of the batch so that its
    randomness can be keyed on it, making the result independent of timing.

    Attributes
    ----------
    queue :
        Queue holding at most ``depth`` prepared batches.

    """

    def __init__(
        self,
        source: Iterable[Any],
        prepare: Callable[[int, Any], Any],
        depth: int = 2,
    ) -> None:
        Thread.__init__(self, name="fitvnet-prefetch", daemon=True)
        self.source = source
        self.prepare = prepare
        self.queue: "queue.Queue" = queue.Queue(maxsize=max(depth, 1))
        # Attribute which can be used to cleanly stop the thread.
        self.flag = True

    def run(self) -> None:
        """Prepare batches till the source is exhausted or the flag is cleared."""
        try:
            for index, item in enumerate(self.source):
                if not self._put(self.prepare(index, item)):
                    return
        except BaseException as e:
            logger.debug("Batch preparation failed: %s", e)
            self._put(_Failure(e))
            return
        self._put(_DONE)

    def __iter__(self) -> Iterator[Any]:
        if self.ident is None:
            self.start()
        try:
            while True:
                item = self.queue.get()
                if item is _DONE:
                    break
                if isinstance(item, _Failure):
                    raise item.error
                yield item
        finally:
            self.stop()

    def stop(self) -> None:
        """Ask the thread to stop and unblock it."""
        self.flag = False
        while True:
            try:
                self.queue.get_nowait()
            except queue.Empty:
                break
        if self.is_alive():
            self.join(2)

    def _put(self, item: Any) -> bool:
        while self.flag:
            try:
                self.queue.put(item, timeout=0.5)
                return True
            except queue.Full:
                continue
        return False


def iterate_prepared(
    source: Iterable[Any], prepare: Callable[[int, Any], Any], depth: int
) -> Iterator[Tuple[int, Any]]:
    """Prepared batches in source order, in a background thread if depth > 0."""
    if depth <= 0:
        for index, item in enumerate(source):
            yield index, prepare(index, item)
        return
    prefetcher = BatchPrefetcher(
        source, lambda i, item: (i, prepare(i, item)), depth
    )
    yield from prefetcher
