"""Deterministic worker-pool helper.

Parameter sweeps are embarrassingly parallel; VORTEX_SPECTRA_THREADS
caps the pool (default 1 = serial).  Results are assembled by index, so
the output order never depends on scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["thread_count", "parallel_map"]


def thread_count():
    raw = os.environ.get("VORTEX_SPECTRA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(fn, items):
    items = list(items)
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=min(workers, len(items))) as pool:
        return list(pool.map(fn, items))
