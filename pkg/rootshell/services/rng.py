"""Counter-based random streams.

Samples are cut into fixed-size blocks; block ``b`` always draws from
``Philox(key=seed).jumped(b)``. Results therefore depend on (seed, samples) only,
never on how many worker threads consumed the blocks.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np

__all__ = ["BLOCK_SIZE", "stream", "run_blocks", "haar_orthogonal"]

logger = logging.getLogger(__name__)

BLOCK_SIZE = 4096


def stream(seed: int, block: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=int(seed)).jumped(int(block)))


def _blocks(samples: int, block_size: int) -> list[tuple[int, int]]:
    out = []
    start, index = 0, 0
    while start < samples:
        count = min(block_size, samples - start)
        out.append((index, count))
        start += count
        index += 1
    return out


def run_blocks(
    fn: Callable[[np.random.Generator, int], np.ndarray],
    samples: int,
    seed: int,
    threads: int = 1,
    block_size: int = BLOCK_SIZE,
) -> np.ndarray:
    """Sum ``fn(rng, count)`` over all blocks in block order.

    ``fn`` returns a fixed-shape array of partial sums for ``count`` draws.
    """
    blocks = _blocks(samples, block_size)

    def work(block):
        index, count = block
        try:
            return np.asarray(fn(stream(seed, index), count))
        except Exception:
            logger.exception("sampling block %d failed", index)
            raise

    if threads <= 1:
        parts = [work(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(work, blocks))
    total = parts[0].copy()
    for part in parts[1:]:
        total = total + part
    logger.debug("merged %d blocks (%d samples, seed %d)", len(blocks), samples, seed)
    return total


def haar_orthogonal(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    """``size`` Haar-distributed elements of SO(n), shape (size, n, n)."""
    z = rng.standard_normal((size, n, n))
    q, r = np.linalg.qr(z)
    signs = np.sign(np.diagonal(r, axis1=1, axis2=2))
    signs[signs == 0] = 1
    q = q * signs[:, None, :]
    # det = -1 のものは第 1 列の符号を反転して SO(n) に入れる
    det = np.linalg.det(q)
    q[det < 0, :, 0] *= -1
    return q
