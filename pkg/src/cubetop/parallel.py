"""Order-preserving parallel map used by the per-edge and per-pair loops."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def resolve_jobs(jobs=None):
    """``jobs`` if given, else ``CUBETOP_JOBS``, else 1."""
    if jobs is None:
        env = os.environ.get("CUBETOP_JOBS")
        jobs = int(env) if env else 1
    return max(1, int(jobs))


def parallel_map(fn, items, jobs=None):
    """``[fn(x) for x in items]``, computed by up to ``jobs`` worker processes.

    Results come back in input order, so output never depends on ``jobs``.
    """
    items = list(items)
    jobs = resolve_jobs(jobs)
    if jobs == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))
