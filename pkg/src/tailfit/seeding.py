"""Counter-based seed derivation and a deterministic parallel map.

Every stochastic stage gets its own generator whose seed is a stable hash of
(master seed, field name, stage tag, replicate index). Results therefore do
not depend on how replicates are distributed over workers.
"""

import hashlib
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np

_MASK64 = (1 << 64) - 1


def derive_seed(master_seed, *parts):
    """Stable 64-bit seed from ``master_seed`` and any str/int parts."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(master_seed) & _MASK64).encode())
    for p in parts:
        h.update(b"\x1f")
        h.update(str(p).encode("utf-8"))
    return int.from_bytes(h.digest(), "little")


def as_generator(seed):
    """Return a numpy Generator for an int seed, or pass a Generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        return np.random.default_rng()
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


def worker_count(requested=None):
    """Number of worker processes, capped by the TAILFIT_THREADS variable."""
    cap = os.environ.get("TAILFIT_THREADS")
    n = requested if requested is not None else (int(cap) if cap else 1)
    if cap:
        n = min(n, int(cap))
    return max(1, int(n))


def parallel_map(fn, items, workers=None):
    """Ordered map over ``items``; uses processes when more than one worker."""
    items = list(items)
    n = worker_count(workers)
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    chunk = max(1, len(items) // (4 * n))
    with ProcessPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items, chunksize=chunk))
