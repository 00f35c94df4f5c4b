"""Conversion of the accepted inputs into a flat 0/1 uint8 array."""
from __future__ import annotations

import numpy as np

from ..cipher import Keystream
from ..errors import InputError


def as_bits(s) -> np.ndarray:
    """Return ``s`` as a 1-D uint8 array of 0/1 values.

    Accepts a ``Keystream``, a string of '0'/'1' characters, packed ``bytes``
    (unpacked most-significant-bit first), or any sequence/array of 0/1.
    """
    if isinstance(s, Keystream):
        return s.bits
    if isinstance(s, str):
        arr = np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0")
        if arr.size and arr.max() > 1:
            raise InputError("bit strings may only contain '0' and '1'")
        return arr.astype(np.uint8)
    if isinstance(s, (bytes, bytearray, memoryview)):
        return np.unpackbits(np.frombuffer(bytes(s), dtype=np.uint8))
    arr = np.asarray(s)
    if arr.ndim != 1:
        raise InputError("bit strings must be one-dimensional")
    if arr.size and (arr.min() < 0 or arr.max() > 1):
        raise InputError("bit values must be 0 or 1")
    return arr.astype(np.uint8, copy=False)
