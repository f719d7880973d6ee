"""Worker-count policy shared by the parallel verification sweeps."""

import os


def worker_count(default: int = 4) -> int:
    """Threads to use; ``SCHAUDER_THREADS`` caps the count (minimum 1)."""
    cap = os.environ.get("SCHAUDER_THREADS")
    n = min(default, os.cpu_count() or 1)
    if cap:
        try:
            n = min(n, int(cap))
        except ValueError:
            pass
    return max(n, 1)
