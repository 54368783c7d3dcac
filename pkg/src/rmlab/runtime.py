"""Worker-count plumbing shared by the enumeration loops."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Workers requested through RMLAB_THREADS (>= 1; invalid values raise)."""
    raw = os.environ.get("RMLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"RMLAB_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ValueError("RMLAB_THREADS must be >= 1")
    return n


def pmap(fn, items):
    """Order-preserving map honoring the worker count; results are merged
    in submission order so reruns are byte-identical."""
    n = worker_count()
    items = list(items)
    if n == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
