"""Execution plumbing: bounded parallel mapping for sweep points.

Sweep points are independent solves with independent seed streams, so
running them concurrently cannot change any result; output order always
follows input order.  The ``ISAC_SIM_THREADS`` environment variable caps
the worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

THREADS_ENV_VAR = "ISAC_SIM_THREADS"


def worker_count(n_items: int) -> int:
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is not None:
        try:
            cap = int(raw)
        except ValueError as exc:
            raise ValueError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}") from exc
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_items))

def parallel_map(fn: Callable[[T], R], items: Sequence[T]) -> list[R]:
    """Apply ``fn`` to every item, preserving order."""
    workers = worker_count(len(items))
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
