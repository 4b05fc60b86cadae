"""Shared small helpers: worker-pool mapping and deterministic CSV formatting."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor

ENV_WORKERS = "AGPFLOW_WORKERS"


def resolve_workers(workers=None) -> int:
    """Explicit argument wins, then the environment override, then serial."""
    if workers is not None:
        return max(int(workers), 1)
    env = os.environ.get(ENV_WORKERS)
    if env:
        return max(int(env), 1)
    return 1


def parallel_map(fn, items, workers=None):
    """Map preserving input order; processes only when workers > 1."""
    items = list(items)
    n = resolve_workers(workers)
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


def fmt(x) -> str:
    """Locale-independent float formatting, 17 significant digits."""
    return format(float(x), ".17g")
