"""Worker-pool plumbing and the tolerance record stamped into manifests."""

import os
from concurrent.futures import ThreadPoolExecutor

# Numerical tolerances in effect across the package, recorded in every
# output manifest.
TOLERANCES = {
    "fom_residual_rtol": 1e-10,
    "coupled_sweep_rtol": 1e-10,
    "newton_kleinman_rtol": 1e-11,
    "rom_solve_rtol": 1e-12,
    "rom_max_iterations": 100,
    "rank_threshold_factor": 1e-12,
    "merge_rtol": 1e-14,
}


def worker_count():
    """Worker cap from OPINF_THREADS; hardware default when unset."""
    raw = os.environ.get("OPINF_THREADS")
    if raw:
        try:
            count = int(raw)
            if count >= 1:
                return count
        except ValueError:
            pass
    return os.cpu_count() or 1


def parallel_map(fn, items, workers=None):
    """Map preserving input order, threaded when more than one worker."""
    items = list(items)
    workers = workers or worker_count()
    workers = min(workers, max(len(items), 1))
    if workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
