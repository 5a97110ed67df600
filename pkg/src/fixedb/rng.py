"""Reproducible random substreams.

Every random quantity in the package is drawn from a generator keyed by a
master seed plus a tuple of integer keys, e.g. ``(seed, replication)`` or
``(seed, path_index)``.  The keys go into ``SeedSequence.spawn_key`` so the
streams are statistically independent and a given key always yields the
same numbers, no matter which worker evaluates it or in which order.
"""

from __future__ import annotations

import numpy as np

# Stream tags keep different consumers of one master seed apart.
TAG_SERIES = 0
TAG_MBB = 1
TAG_PATHS = 2
TAG_BOOT = 3
TAG_REPLICATION = 4
TAG_ORACLE = 5
TAG_GRID = 6


def substream(seed: int, *keys: int) -> np.random.Generator:
    """Return a PCG64 generator for ``(seed, *keys)``."""
    if seed < 0 or any(k < 0 for k in keys):
        raise ValueError("seed and keys must be non-negative integers")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.PCG64(ss))


def derive_seed(seed: int, *keys: int) -> int:
    """A 63-bit integer seed deterministically derived from ``(seed, *keys)``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))
