"""Thread-count control.

SEEDSCOPE_THREADS caps in-process parallelism; unset means serial.
Results never depend on the worker count because every parallel unit owns
an index-based RNG substream and writes its own output slot.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["thread_count", "map_indexed"]


def thread_count() -> int:
    env = os.environ.get("SEEDSCOPE_THREADS")
    if not env:
        return 1
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def map_indexed(fn, items):
    """Apply ``fn`` over ``items`` preserving order, threaded when allowed."""
    items = list(items)
    workers = min(thread_count(), len(items)) if items else 1
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
