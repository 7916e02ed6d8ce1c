import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("EIGENMIN_THREADS", "1")))
    except ValueError:
        return 1


def task_seed(master, index: int) -> np.random.SeedSequence:
    """Per-task seed; depends only on ``(master, index)``, never on scheduling.

    ``master`` is an integer or a SeedSequence (nested task streams).
    """
    if isinstance(master, np.random.SeedSequence):
        return np.random.SeedSequence(master.entropy, spawn_key=(*master.spawn_key, int(index)))
    return np.random.SeedSequence([int(master) & (2**64 - 1), int(index)])


def parallel_map(fn, items):
    items = list(items)
    workers = min(thread_count(), len(items)) or 1
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
