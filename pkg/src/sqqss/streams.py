"""Deterministic random streams split into fixed-size blocks.

Work is cut into blocks of a fixed size and every block draws from its own
child of the master :class:`numpy.random.SeedSequence`. Results therefore do not
depend on how many workers process the blocks.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, TypeVar

import numpy as np

T = TypeVar("T")

BLOCK_SIZE = 16384

SeedLike = int | np.random.SeedSequence | np.random.Generator | None


def seed_sequence(seed: SeedLike) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, np.random.Generator):
        return np.random.SeedSequence(int(seed.integers(2**63)))
    return np.random.SeedSequence(seed)


def block_sizes(total: int, block_size: int = BLOCK_SIZE) -> list[int]:
    full, rest = divmod(int(total), block_size)
    return [block_size] * full + ([rest] if rest else [])


def map_blocks(
    fn: Callable[[int, np.random.Generator], T],
    total: int,
    seed: SeedLike,
    workers: int = 1,
    block_size: int = BLOCK_SIZE,
) -> list[T]:
    """Run ``fn(size, rng)`` over consecutive blocks covering ``total`` items."""
    sizes = block_sizes(total, block_size)
    children = seed_sequence(seed).spawn(len(sizes))
    jobs = [(size, np.random.default_rng(child)) for size, child in zip(sizes, children)]
    if workers <= 1 or len(jobs) <= 1:
        return [fn(size, rng) for size, rng in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: fn(*job), jobs))
