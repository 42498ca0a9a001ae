"""Run independent shards serially or in a process pool."""

from concurrent.futures import ProcessPoolExecutor


def map_shards(fn, tasks, workers=1):
    """``[fn(*t) for t in tasks]``, optionally spread over worker processes.

    ``fn`` must be a module-level function.  Results come back in task
    order, so merges downstream are deterministic.
    """
    tasks = list(tasks)
    if workers is None or workers <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(fn, *zip(*tasks)))
