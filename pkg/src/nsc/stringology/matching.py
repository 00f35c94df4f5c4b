"""Exact pattern matching over bit strings: naive scan, KMP and Boyer-Moore.

All three return 0-based start positions in bit coordinates, overlapping
occurrences included.
"""
from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import InputError
from .bitstring import as_bits


def _prepare(p, s) -> tuple[np.ndarray, np.ndarray]:
    p = as_bits(p)
    s = as_bits(s)
    if p.size == 0:
        raise InputError("pattern must be non-empty")
    return p, s


def naive_search(p, s) -> list[int]:
    """Reference scan comparing the pattern against every window."""
    p, s = _prepare(p, s)
    if p.size > s.size:
        return []
    hits = np.all(sliding_window_view(s, p.size) == p, axis=1)
    return np.flatnonzero(hits).tolist()


def count_occurrences(p, s) -> int:
    """Number of (possibly overlapping) positions where ``p`` occurs in ``s``."""
    return len(naive_search(p, s))


def prefix_function(p: bytes) -> list[int]:
    pi = [0] * len(p)
    k = 0
    for i in range(1, len(p)):
        while k and p[i] != p[k]:
            k = pi[k - 1]
        if p[i] == p[k]:
            k += 1
        pi[i] = k
    return pi


def kmp_search(p, s) -> list[int]:
    """Knuth-Morris-Pratt search, O(n + m)."""
    p, s = _prepare(p, s)
    m = p.size
    if m > s.size:
        return []
    pat = p.tobytes()
    pi = prefix_function(pat)
    out = []
    j = 0
    for i, c in enumerate(s.tobytes()):
        while j and c != pat[j]:
            j = pi[j - 1]
        if c == pat[j]:
            j += 1
            if j == m:
                out.append(i - m + 1)
                j = pi[j - 1]
    return out


def _good_suffix_shifts(p: bytes) -> list[int]:
    # strong good-suffix table, shift[j] applies after a mismatch at j - 1
    m = len(p)
    shift = [0] * (m + 1)
    border = [0] * (m + 1)
    i, j = m, m + 1
    border[i] = j
    while i > 0:
        while j <= m and p[i - 1] != p[j - 1]:
            if shift[j] == 0:
                shift[j] = j - i
            j = border[j]
        i -= 1
        j -= 1
        border[i] = j
    j = border[0]
    for i in range(m + 1):
        if shift[i] == 0:
            shift[i] = j
        if i == j:
            j = border[j]
    return shift


def bm_bytes(pattern: bytes, text: bytes) -> list[int]:
    """Boyer-Moore over a byte alphabet (bad-character + good-suffix rules)."""
    m, n = len(pattern), len(text)
    if m == 0:
        raise InputError("pattern must be non-empty")
    if m > n:
        return []
    last = [-1] * 256
    for i, c in enumerate(pattern):
        last[c] = i
    shift = _good_suffix_shifts(pattern)
    out = []
    pos = 0
    while pos <= n - m:
        j = m - 1
        while j >= 0 and pattern[j] == text[pos + j]:
            j -= 1
        if j < 0:
            out.append(pos)
            pos += shift[0]
        else:
            pos += max(shift[j + 1], j - last[text[pos + j]])
    return out


def bm_search(p, s) -> list[int]:
    """Boyer-Moore search with bit-level results.

    Skip heuristics are useless on a two-letter alphabet, so the text is
    packed into bytes at each of the 8 bit alignments and the whole bytes of
    the pattern are searched with byte-level Boyer-Moore; the remaining
    ``m mod 8`` tail bits are checked directly.
    """
    p, s = _prepare(p, s)
    m, n = p.size, s.size
    if m > n:
        return []
    full, tail = divmod(m, 8)
    head = np.packbits(p[: 8 * full]).tobytes()
    out = []
    for align in range(8):
        if align + m > n:
            break
        text = np.packbits(s[align:])
        if full == 0:
            want = int(np.packbits(p, bitorder="big")[0]) >> (8 - tail)
            cand = np.flatnonzero((text >> (8 - tail)) == want)
        else:
            cand = np.asarray(bm_bytes(head, text.tobytes()), dtype=np.int64)
        for q in cand.tolist():
            pos = align + 8 * q
            if pos + m > n:
                continue
            if tail and full and not np.array_equal(s[pos + 8 * full: pos + m], p[8 * full:]):
                continue
            out.append(pos)
    out.sort()
    return out
