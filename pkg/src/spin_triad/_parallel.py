"""Blocked, seed-stream Monte Carlo helpers.

Work is cut into fixed-size blocks and block ``b`` draws from the stream
``SeedSequence(seed, spawn_key=(b,))``. The sample set therefore does not
depend on the worker count, and merging in block order makes results
bit-identical for any number of workers.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

BLOCK = 1 << 14
WORKERS_ENV = "SPIN_TRIAD_WORKERS"

T = TypeVar("T")


def resolve_workers(workers: int | None) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        workers = int(env)
    return max(1, int(workers or 1))


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def run_blocks(
    fn: Callable[[np.random.Generator, int], T],
    total: int,
    seed: int,
    workers: int = 1,
    block: int = BLOCK,
) -> list[T]:
    """Call ``fn(rng, count)`` once per block, results in block order."""
    if total < 1:
        raise ValueError("need at least one sample")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    nblocks = math.ceil(total / block)
    sizes = [min(block, total - b * block) for b in range(nblocks)]

    def job(b: int) -> T:
        return fn(block_rng(seed, b), sizes[b])

    if workers <= 1 or nblocks == 1:
        return [job(b) for b in range(nblocks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(nblocks)))


def merge_moments(parts: list[tuple[int, float, float]]) -> tuple[int, float, float]:
    """Combine ``(count, mean, M2)`` triples (Chan et al. pairwise update)."""
    n, mean, m2 = 0, 0.0, 0.0
    for nb, mb, m2b in parts:
        if nb == 0:
            continue
        tot = n + nb
        delta = mb - mean
        mean += delta * nb / tot
        m2 += m2b + delta * delta * n * nb / tot
        n = tot
    return n, mean, m2


def moments(values: np.ndarray) -> tuple[int, float, float]:
    mean = float(values.mean())
    return values.size, mean, float(((values - mean) ** 2).sum())
