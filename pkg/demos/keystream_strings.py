"""Reduced-round keystreams seen as bit strings.

Two rounds of EChaCha20 leave structure that plain string statistics pick up.
From four rounds on, the same statistics match OS random bytes.

    python3 demos/keystream_strings.py
"""
import numpy as np

from nsc.cipher import dump_schedule, echacha_keystream
from nsc.stringology import (
    chi_square_zscore,
    collision_stats,
    longest_repeated_substring,
    ngram_histogram,
    serial_correlation,
)

NBITS = 1 << 15

print(dump_schedule())
print()

rng = np.random.default_rng(7)
key, nonce = rng.bytes(32), rng.bytes(16)

print(f"{'source':<14}{'z(m=8)':>9}{'LRS':>6}{'peak16':>8}{'corr@32':>9}")
sources = [(f"r={r}", echacha_keystream(key, nonce, rounds=r, nbits=NBITS)) for r in (2, 4, 8, 20)]
sources.append(("os bytes", rng.bytes(NBITS // 8)))
for name, ks in sources:
    h = ngram_histogram(ks, 8)
    lrs = longest_repeated_substring(ks)
    coll = collision_stats(ks, 16).max_multiplicity
    corr = serial_correlation(ks, 32)
    print(f"{name:<14}{chi_square_zscore(h):9.2f}{lrs:6d}{coll:8d}{corr:9.4f}")

