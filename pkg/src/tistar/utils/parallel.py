"""
Thread pool helpers.

Work is split into index-ordered chunks; results come back in chunk order
so reductions over them are reproducible regardless of worker count.
"""

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

from .logging import get_logger

logger = get_logger(__name__)

T = TypeVar("T")

_max_workers = 1


def configure_workers(threads: int) -> None:
    """Set the worker cap used by :func:`chunked_map`."""
    global _max_workers
    if threads < 1:
        raise ValueError("Thread count must be positive")
    _max_workers = threads
    logger.debug(f"Worker cap set to {threads}")


def get_workers() -> int:
    """Worker cap set by the last :func:`configure_workers` call."""
    return _max_workers


def chunk_bounds(n_items: int, chunk_size: int) -> list[tuple[int, int]]:
    """Split ``range(n_items)`` into consecutive ``[start, stop)`` slices."""
    if chunk_size < 1:
        raise ValueError("Chunk size must be positive")
    return [(i, min(i + chunk_size, n_items)) for i in range(0, n_items, chunk_size)]


def chunked_map(
    fn: Callable[[int, int], T],
    n_items: int,
    chunk_size: int = 256,
    threads: int | None = None,
) -> list[T]:
    """
    Apply ``fn(start, stop)`` to consecutive slices of ``range(n_items)``.

    Slices run on a thread pool when more than one worker is allowed.
    The returned list is always in slice order.
    """
    bounds = chunk_bounds(n_items, chunk_size)
    workers = min(threads or get_workers(), len(bounds)) if bounds else 1

    if workers <= 1:
        return [fn(start, stop) for start, stop in bounds]

    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, start, stop) for start, stop in bounds]
        return [f.result() for f in futures]
