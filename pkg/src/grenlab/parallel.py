"""Deterministic fan-out of replicate blocks over worker processes."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def blocks(n: int, size: int) -> list[tuple[int, int]]:
    return [(s, min(s + size, n)) for s in range(0, n, size)]


def run_blocks(fn, tasks, workers: int | None = None) -> list:
    """``[fn(t) for t in tasks]``, possibly in parallel; output order follows ``tasks``.

    ``workers=None`` uses every CPU. Callers derive each replicate's random
    stream from its index, so results never depend on ``workers``.
    """
    if workers is None:
        workers = os.cpu_count() or 1
    if workers <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))
