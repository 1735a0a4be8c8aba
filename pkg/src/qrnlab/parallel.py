"""Order-preserving parallel map over seeds and samples."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import TypeVar

from .config import thread_cap
from .logger_config import logger

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Sequence[T], max_workers: int | None = None) -> list[R]:
    """
    Apply ``fn`` to every item on a thread pool and return results in input order.

    The worker count is capped by QRN_THREADS.
    """
    if not items:
        return []
    workers = min(max_workers or thread_cap(), thread_cap(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]

    results: list[R | None] = [None] * len(items)
    logger.debug(f"parallel_map: {len(items)} jobs on {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        future_to_index = {executor.submit(fn, item): i for i, item in enumerate(items)}
        for future in as_completed(future_to_index):
            results[future_to_index[future]] = future.result()
    return results  # type: ignore[return-value]
