"""Seed handling shared by every stochastic routine.

A run has a single master seed. Work that may be spread over parallel workers
is cut into fixed-size shards *before* any worker is involved; shard ``k`` draws
from ``SeedSequence(seed, spawn_key=(stream, k))``. The split depends only on
(seed, stream, shard index), so results are identical for any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence, TypeVar

import numpy as np

WORKERS_ENV = "STOCHBRIDGE_WORKERS"
SHARD_SIZE = 16384

T = TypeVar("T")

# stream ids keep the substreams of different subsystems disjoint
STREAM_JUMP = 1
STREAM_WAITING = 2
STREAM_WALKERS = 3
STREAM_NELSON = 4


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return seed


def generator(seed: int, stream: int, index: int = 0) -> np.random.Generator:
    """Generator for substream ``(stream, index)`` of the master ``seed``."""
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=(stream, index))
    return np.random.Generator(np.random.PCG64(ss))


def shard_bounds(n: int, shard_size: int = SHARD_SIZE) -> list[tuple[int, int]]:
    return [(lo, min(lo + shard_size, n)) for lo in range(0, n, shard_size)]


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def map_ordered(fn: Callable[..., T], items: Sequence, workers: int | None = None) -> list[T]:
    """``[fn(item) for item in items]``, possibly on a thread pool; order is kept."""
    n = worker_count(workers)
    if n == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
