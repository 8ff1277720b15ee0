"""Order-preserving map over replicate indices, optionally in worker processes."""

from concurrent.futures import ProcessPoolExecutor


def run_indexed(func, indices, workers=1, chunksize=None):
    """``[func(i) for i in indices]``, computed by ``workers`` processes.

    Results come back in index order whatever the worker count, so callers
    that seed each index independently get identical output.
    """
    indices = list(indices)
    if workers is None or workers <= 1 or len(indices) <= 1:
        return [func(i) for i in indices]
    if chunksize is None:
        chunksize = max(1, len(indices) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, indices, chunksize=chunksize))
