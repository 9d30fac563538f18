import os
from concurrent.futures import ProcessPoolExecutor


def worker_count() -> int:
    env = os.environ.get("HPX_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def pmap(fn, items, workers=None):
    """Order-preserving map; uses processes only when more than one worker is allowed."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(workers, len(items))) as ex:
        return list(ex.map(fn, items, chunksize=max(1, len(items) // (4 * workers))))
