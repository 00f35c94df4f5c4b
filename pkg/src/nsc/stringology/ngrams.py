"""Overlapping m-gram histograms and the statistics derived from them."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ..errors import InputError
from .bitstring import as_bits

MAX_M = 32


def window_values(bits: np.ndarray, m: int) -> np.ndarray:
    """Integer value of every m-bit window (stride 1, MSB first), as uint64."""
    if not 1 <= m <= 64:
        raise InputError(f"window length must be in 1..64, got {m}")
    w = bits.size - m + 1
    if w <= 0:
        raise InputError(f"window length {m} exceeds string length {bits.size}")
    out = np.zeros(w, dtype=np.uint64)
    for j in range(m):
        out <<= np.uint64(1)
        out |= bits[j: j + w]
    return out


@dataclass(frozen=True)
class NgramHistogram:
    """Counts of m-bit windows.

    For ``m <= 8`` every bin is stored (``keys`` is ``arange(2**m)``); for
    larger ``m`` only the observed windows are kept.
    """

    m: int
    keys: np.ndarray
    counts: np.ndarray
    windows: int

    @property
    def nbins(self) -> int:
        return 1 << self.m

    @property
    def expected(self) -> float:
        return self.windows / self.nbins

    def dense(self) -> np.ndarray:
        if self.m > 24:
            raise InputError("dense view limited to m <= 24")
        out = np.zeros(self.nbins, dtype=np.int64)
        out[self.keys.astype(np.int64)] = self.counts
        return out

    def as_dict(self) -> dict[int, int]:
        nz = self.counts > 0
        return dict(zip(self.keys[nz].tolist(), self.counts[nz].tolist()))


def ngram_histogram(s, m: int) -> NgramHistogram:
    bits = as_bits(s)
    if not 1 <= m <= MAX_M:
        raise InputError(f"m must be in 1..{MAX_M}, got {m}")
    if m > bits.size:
        raise InputError(f"m = {m} exceeds string length {bits.size}")
    vals = window_values(bits, m)
    if m <= 8:
        counts = np.bincount(vals.astype(np.int64), minlength=1 << m)
        keys = np.arange(1 << m, dtype=np.uint64)
    else:
        keys, counts = np.unique(vals, return_counts=True)
    return NgramHistogram(m, keys, counts.astype(np.int64), int(vals.size))


def chi_square_uniform(h: NgramHistogram) -> float:
    """Pearson statistic against the uniform expectation ``windows / 2**m``.

    Bins missing from a sparse histogram each contribute ``expected``.
    """
    e = h.expected
    observed = float(np.sum((h.counts - e) ** 2) / e)
    absent = h.nbins - h.keys.size
    return observed + absent * e


def shannon_entropy(h: NgramHistogram) -> float:
    c = h.counts[h.counts > 0]
    p = c / h.windows
    return float(max(0.0, -np.sum(p * np.log2(p))))


class CollisionStats(NamedTuple):
    distinct_ratio: float
    max_multiplicity: int


def collision_stats(s, m: int) -> CollisionStats:
    """Fraction of possible distinct windows seen, and the largest window count."""
    h = s if isinstance(s, NgramHistogram) else ngram_histogram(s, m)
    distinct = int(np.count_nonzero(h.counts))
    return CollisionStats(distinct / min(h.windows, h.nbins), int(h.counts.max()))


def chi_square_zscore(h: NgramHistogram) -> float:
    """(chi2 - dof) / sqrt(2 dof), dof = 2**m - 1 capped at windows - 1."""
    dof = max(1, min(h.nbins - 1, h.windows - 1))
    return (chi_square_uniform(h) - dof) / math.sqrt(2 * dof)
