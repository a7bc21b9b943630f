#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Bounded, order-preserving parallel map.

Results always come back in input order so reports stay deterministic
regardless of the thread cap.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")

logger = logging.getLogger("attractorkit.parallel")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], threads: int = 1) -> List[R]:
    """
    Apply ``fn`` to every item, using at most ``threads`` worker threads.

    Args:
        fn: Pure function of one item
        items: Inputs
        threads: Thread cap; 1 runs inline

    Returns:
        List of results in input order
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = min(threads, len(items))
    logger.debug(f"Mapping {len(items)} items over {workers} threads")
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
