"""
Reproducible random streams and a small deterministic parallel map.

Every random quantity in the package is drawn from a stream keyed by a master
seed plus a tuple of integers (trial index, replicate index, ...). Streams are
built from :class:`numpy.random.SeedSequence` spawn keys, so distinct keys give
statistically independent PCG64 generators and any execution order reproduces
the serial result.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

THREADS_ENV = "SKETCHLS_THREADS"

# Namespaces keep streams for different purposes apart under one master seed.
SKETCH = 1
IHS = 2
BOOTSTRAP = 3
TRIAL = 4
DATA = 5


def _seed_sequence(seed: int, keys) -> np.random.SeedSequence:
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in keys))


def stream(seed: int, *keys: int) -> np.random.Generator:
    """Generator for substream ``keys`` of master `seed`."""
    return np.random.Generator(np.random.PCG64(_seed_sequence(seed, keys)))


def derive_seed(seed: int, *keys: int) -> int:
    """A 64-bit seed for substream ``keys`` of master `seed`."""
    return int(_seed_sequence(seed, keys).generate_state(1, np.uint64)[0])


def resolve_workers(workers=None) -> int:
    """Number of worker threads.

    ``None`` reads ``SKETCHLS_THREADS`` (unset or 0 means one per CPU).
    """
    if workers is None:
        raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
        try:
            workers = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    workers = int(workers)
    if workers < 0:
        raise ValueError(f"worker count must be >= 0, got {workers}")
    if workers == 0:
        workers = os.cpu_count() or 1
    return workers


def parallel_map(fn, items, workers=None) -> list:
    """``[fn(x) for x in items]``, possibly on a thread pool, in input order."""
    items = list(items)
    workers = min(resolve_workers(workers), max(len(items), 1))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
