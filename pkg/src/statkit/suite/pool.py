"""Ordered worker pool for per-point evaluation."""

from __future__ import annotations

import itertools
import logging
import os
from collections.abc import Callable, Iterable, Iterator, Mapping
from typing import TypeVar

from joblib import Parallel, delayed

from statkit.config import THREADS_ENV

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

DEFAULT_MAX_WORKERS = 8
# Items pulled from the input per worker before results are handed back
DISPATCH_FACTOR = 4


def worker_count(requested: int | None = None, env: Mapping[str, str] = os.environ) -> int:
    """Workers to use: ``requested``, capped by $STATKIT_THREADS when set."""
    workers = requested or min(DEFAULT_MAX_WORKERS, os.cpu_count() or 1)
    raw = env.get(THREADS_ENV)
    if raw:
        try:
            cap = int(raw)
        except ValueError:
            logger.warning("ignoring %s=%r (not an integer)", THREADS_ENV, raw)
        else:
            workers = min(workers, max(cap, 1))
    return max(workers, 1)


def chunked(items: Iterable[T], size: int) -> Iterator[list[T]]:
    it = iter(items)
    while chunk := list(itertools.islice(it, size)):
        yield chunk


def ordered_map(fn: Callable[[T], R], items: Iterable[T], workers: int) -> Iterator[R]:
    """Map ``fn`` over ``items`` in worker processes, yielding results in input order.

    At most ``DISPATCH_FACTOR * workers`` items are pulled from ``items``
    ahead of the results already yielded.
    """
    if workers <= 1:
        yield from map(fn, items)
        return
    window = DISPATCH_FACTOR * workers
    logger.debug("evaluating with %d workers, window %d", workers, window)
    with Parallel(n_jobs=workers) as parallel:
        for chunk in chunked(items, window):
            yield from parallel(delayed(fn)(item) for item in chunk)
