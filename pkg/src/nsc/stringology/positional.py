"""Position-dependent statistics: lagged bit correlation and block densities."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..errors import InputError
from .bitstring import as_bits

# rotation amounts of the six-word quarter-round, plus the word size
SERIAL_LAGS = (1, 2, 4, 7, 8, 12, 16, 32)


def serial_correlation(s, lag: int) -> float:
    """Pearson correlation of s_i and s_{i+lag} under the +/-1 encoding.

    Returns 0.0 when either side is constant.
    """
    bits = as_bits(s)
    if lag < 1 or lag >= bits.size:
        raise InputError(f"lag must be in 1..{bits.size - 1}, got {lag}")
    x = 2.0 * bits - 1.0
    a, b = x[:-lag], x[lag:]
    a = a - a.mean()
    b = b - b.mean()
    den = np.sqrt(np.dot(a, a) * np.dot(b, b))
    if den == 0.0:
        return 0.0
    return float(np.clip(np.dot(a, b) / den, -1.0, 1.0))


class BlockDensity(NamedTuple):
    fractions: np.ndarray
    variance: float
    min: float
    max: float


def block_density(s, blocks: int) -> BlockDensity:
    """Ones-fraction of ``blocks`` near-equal contiguous pieces of ``s``."""
    bits = as_bits(s)
    if blocks < 1 or blocks > bits.size:
        raise InputError(f"blocks must be in 1..{bits.size}, got {blocks}")
    edges = np.arange(blocks + 1, dtype=np.int64) * bits.size // blocks
    ones = np.add.reduceat(bits.astype(np.int64), edges[:-1])
    frac = ones / np.diff(edges)
    return BlockDensity(frac, float(frac.var()), float(frac.min()), float(frac.max()))
