from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

from .environment import resolve_num_workers

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], num_workers: int = None) -> List[R]:
    """Map ``fn`` over ``items`` keeping input order. ``fn`` must be picklable when more than one worker runs."""
    items = list(items)
    workers = min(resolve_num_workers(num_workers), max(1, len(items)))

    if workers == 1:
        return [fn(item) for item in items]

    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))
