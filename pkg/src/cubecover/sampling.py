"""Block-deterministic uniform sampling on [-1, 1]^d.

Every Monte Carlo estimator in the package draws its points through
:func:`map_blocks`. Samples are cut into fixed-size blocks and block ``i`` is
generated from ``SeedSequence(seed, spawn_key=(i,))``, so a block's content
depends only on ``(seed, i)``. Per-block results are always combined in block
order, which makes every estimate bit-identical whatever the worker count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, Tuple, TypeVar

import numpy as np

BLOCK_SIZE = 1 << 16
MIN_SAMPLES = 1000

T = TypeVar("T")


def block_sizes(samples: int, block_size: int = BLOCK_SIZE) -> List[int]:
    full, rest = divmod(samples, block_size)
    return [block_size] * full + ([rest] if rest else [])


def uniform_block(d: int, size: int, seed: int, index: int) -> np.ndarray:
    """Uniform points in [-1, 1]^d for block ``index`` of the stream ``seed``."""
    ss = np.random.SeedSequence(int(seed) & 0xFFFFFFFFFFFFFFFF, spawn_key=(index,))
    rng = np.random.Generator(np.random.PCG64(ss))
    return rng.uniform(-1.0, 1.0, size=(size, d))


def map_blocks(
    fn: Callable[[np.ndarray], T],
    d: int,
    samples: int,
    seed: int,
    workers: int = 1,
) -> List[T]:
    """Apply ``fn`` to every sample block and return the results in block order."""
    if samples < 1:
        raise ValueError("samples must be positive")
    sizes = block_sizes(samples)

    def run(i: int) -> T:
        return fn(uniform_block(d, sizes[i], seed, i))

    if workers <= 1 or len(sizes) == 1:
        return [run(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(len(sizes))))


def check_samples(samples: int) -> None:
    if samples < MIN_SAMPLES:
        raise ValueError(f"Monte Carlo estimators need at least {MIN_SAMPLES} samples, got {samples}")


def mean_and_stderr(blocks: Sequence[np.ndarray]) -> Tuple[float, float]:
    """Sample mean and standard error of the concatenated blocks.

    Block statistics are merged pairwise-free, left to right (Chan et al.),
    so the result depends only on the block contents and their order.
    """
    count = 0
    mean = 0.0
    m2 = 0.0
    for values in blocks:
        nb = values.size
        if nb == 0:
            continue
        mb = float(values.mean())
        m2b = float(((values - mb) ** 2).sum())
        total = count + nb
        delta = mb - mean
        mean += delta * nb / total
        m2 += m2b + delta * delta * count * nb / total
        count = total
    if count < 2:
        return mean, 0.0
    var = m2 / (count - 1)
    return mean, float(np.sqrt(var / count))


def binomial_stderr(p: float, samples: int) -> float:
    return float(np.sqrt(max(p * (1.0 - p), 0.0) / samples))
