import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor

THREADS_ENV = "ZAREMBA_THREADS"


def worker_count() -> int:
    """
    Worker threads for independent evaluations; `ZAREMBA_THREADS` overrides the default.

    >>> os.environ[THREADS_ENV] = "3"
    >>> worker_count()
    3
    >>> del os.environ[THREADS_ENV]
    """
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            logging.warning(f"Ignoring {THREADS_ENV}={raw!r}: not an integer")
    return min(8, os.cpu_count() or 1)


def ordered_map[T, R](fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """
    Map over items on a thread pool; results come back in submission order.

    >>> ordered_map(lambda x: x * x, [1, 2, 3])
    [1, 4, 9]
    """
    values = list(items)
    workers = worker_count()
    if workers == 1 or len(values) < 2:
        return [fn(v) for v in values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, values))
