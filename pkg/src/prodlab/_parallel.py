"""Deterministic chunked execution for the enumeration kernels.

Workers receive contiguous chunks and results come back in chunk order,
so any merge that is order-independent (set union, integer counters) or
applied to the concatenation in order is bit-identical at every thread
count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def split_chunks(items: Sequence[T], parts: int) -> list[list[T]]:
    n = len(items)
    parts = max(1, min(parts, n))
    size, extra = divmod(n, parts)
    out = []
    start = 0
    for i in range(parts):
        end = start + size + (1 if i < extra else 0)
        out.append(list(items[start:end]))
        start = end
    return out


def map_chunks(func: Callable[[list[T]], R], items: Sequence[T], threads: int = 1) -> list[R]:
    """Apply func to chunks of items, returning per-chunk results in order."""
    items = list(items)
    if not items:
        return []
    if threads <= 1 or len(items) == 1:
        return [func(items)]
    chunks = split_chunks(items, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, chunks))
