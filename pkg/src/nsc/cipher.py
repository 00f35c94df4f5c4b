"""Round-parameterized EChaCha20 and reference ChaCha20 keystream generators.

All arithmetic is on 32-bit words. The block functions are vectorized over a
trailing batch axis so a whole corpus of keystreams can be produced with a
handful of numpy calls; the scalar entry points are thin wrappers around
the batched ones.

EChaCha20 state (24 words, 4 rows x 6 columns)::

    row 0:  C0  C1  C2  C3  C4  C5
    row 1:  k0  k1  k2  k3  k4  k5
    row 2:  k6  k7  n0  n1  n2  n3
    row 3:  ctr_lo ctr_hi C6 C7 C8 C9

A round pair is a row round (six-word mixing on each row) followed by a
diagonal round. Diagonal ``k`` takes, for every column ``c``, the word in
row ``(k + c) mod 4``, so the four diagonals partition the state and each
one touches every column.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, InputError

MASK32 = 0xFFFFFFFF

QR6_ROTATIONS = (2, 4, 7, 8, 12, 16)
CHACHA_ROTATIONS = (16, 12, 8, 7)

ECHACHA_BLOCK_BYTES = 96
CHACHA_BLOCK_BYTES = 64
DEFAULT_ROUNDS = 20

# 35 ASCII bytes, space padded to the 40 needed for ten words.
ECHACHA_SIGMA = b"expand 40-byte key extended state!!".ljust(40, b" ")
ECHACHA_CONSTANTS = tuple(int(w) for w in np.frombuffer(ECHACHA_SIGMA, dtype="<u4"))
CHACHA_CONSTANTS = (0x61707865, 0x3320646E, 0x79622D32, 0x6B206574)

ROW_SCHEDULE = tuple(tuple(6 * row + col for col in range(6)) for row in range(4))
DIAGONAL_SCHEDULE = tuple(
    tuple(6 * ((k + col) % 4) + col for col in range(6)) for k in range(4)
)


def rotl32(x, r: int):
    """Rotate a 32-bit word (or uint32 array) left by ``r`` bits, 0 <= r <= 31."""
    if not isinstance(r, (int, np.integer)) or not 0 <= r <= 31:
        raise InputError(f"rotation amount must be in 0..31, got {r!r}")
    r = int(r)
    if isinstance(x, np.ndarray):
        if r == 0:
            return x.copy()
        return (x << np.uint32(r)) | (x >> np.uint32(32 - r))
    x = int(x) & MASK32
    return ((x << r) | (x >> (32 - r))) & MASK32


def _qr6(y):
    # y: list of six uint32 arrays with a common shape
    y0, y1, y2, y3, y4, y5 = y
    z1 = y1 ^ rotl32(y0 + y5, 2)
    z2 = y2 ^ rotl32(z1 + y3, 4)
    z3 = y3 ^ rotl32(z2 + y4, 7)
    z4 = y4 ^ rotl32(z3 + y0, 8)
    z5 = y5 ^ rotl32(z4 + z1, 12)
    z0 = y0 ^ rotl32(z5 + z2, 16)
    return [z0, z1, z2, z3, z4, z5]


def echacha_qr6(w):
    """Six-word extended quarter-round.

    Accepts six Python ints (returns a tuple of ints) or an array whose first
    axis has length 6 (returns a uint32 array of the same shape).
    """
    if isinstance(w, np.ndarray):
        if w.shape[:1] != (6,):
            raise InputError("echacha_qr6 needs exactly 6 words")
        return np.stack(_qr6([np.asarray(v, dtype=np.uint32) for v in w]))
    words = [int(v) for v in w]
    if len(words) != 6:
        raise InputError("echacha_qr6 needs exactly 6 words")
    out = _qr6([np.array([v & MASK32], dtype=np.uint32) for v in words])
    return tuple(int(v[0]) for v in out)


def echacha_round_pair(state: np.ndarray) -> np.ndarray:
    """One row round followed by one diagonal round; returns a new state.

    ``state`` has shape (24,) or (24, batch).
    """
    s = np.array(state, dtype=np.uint32, copy=True)
    if s.shape[:1] != (24,):
        raise InputError("EChaCha state must have 24 words")
    for schedule in (ROW_SCHEDULE, DIAGONAL_SCHEDULE):
        for idx in schedule:
            out = _qr6([s[i] for i in idx])
            for i, v in zip(idx, out):
                s[i] = v
    return s


def dump_schedule() -> str:
    """Human-readable table of the row and diagonal index sets."""
    lines = ["# round   group  word indices (QR6 inputs y0..y5)"]
    for name, schedule in (("row", ROW_SCHEDULE), ("diagonal", DIAGONAL_SCHEDULE)):
        for g, idx in enumerate(schedule):
            lines.append(f"{name:<9} {g:<6} " + " ".join(f"{i:2d}" for i in idx))
    return "\n".join(lines)


def _check_rounds(rounds: int) -> int:
    if not isinstance(rounds, (int, np.integer)) or rounds < 2 or rounds % 2:
        raise ConfigError(f"rounds must be an even integer >= 2, got {rounds!r}")
    return int(rounds)


def _as_bytes(value, size: int, what: str) -> bytes:
    if isinstance(value, str):
        value = bytes.fromhex(value)
    value = bytes(value)
    if len(value) != size:
        raise InputError(f"{what} must be {size} bytes, got {len(value)}")
    return value


def _words(rows: np.ndarray, nwords: int) -> np.ndarray:
    # (batch, 4*nwords) uint8 -> (nwords, batch) uint32, little-endian
    rows = np.ascontiguousarray(rows, dtype=np.uint8)
    return rows.view("<u4").reshape(rows.shape[0], nwords).T.astype(np.uint32)


def echacha_initial_states(keys: np.ndarray, nonces: np.ndarray, counters: np.ndarray) -> np.ndarray:
    """Build initial states of shape (24, batch).

    ``keys`` is (batch, 32) bytes, ``nonces`` (batch, 16) bytes, ``counters``
    a length-batch array of 64-bit block counters.
    """
    counters = np.asarray(counters, dtype=np.uint64)
    batch = counters.shape[0]
    state = np.empty((24, batch), dtype=np.uint32)
    consts = np.array(ECHACHA_CONSTANTS, dtype=np.uint32)[:, None]
    state[0:6] = consts[0:6]
    state[6:14] = _words(keys, 8)
    state[14:18] = _words(nonces, 4)
    state[18] = (counters & np.uint64(MASK32)).astype(np.uint32)
    state[19] = (counters >> np.uint64(32)).astype(np.uint32)
    state[20:24] = consts[6:10]
    return state


def echacha_blocks(keys: np.ndarray, nonces: np.ndarray, counters: np.ndarray, rounds: int = DEFAULT_ROUNDS) -> np.ndarray:
    """Batched block function; returns (batch, 96) uint8."""
    rounds = _check_rounds(rounds)
    init = echacha_initial_states(keys, nonces, counters)
    s = init
    for _ in range(rounds // 2):
        s = echacha_round_pair(s)
    out = (s + init).T.astype("<u4")
    return np.ascontiguousarray(out).view(np.uint8).reshape(-1, ECHACHA_BLOCK_BYTES)


def echacha_block(key, nonce, counter: int, rounds: int = DEFAULT_ROUNDS) -> bytes:
    """One 768-bit EChaCha20 block for a 32-byte key and 16-byte nonce."""
    key = _as_bytes(key, 32, "key")
    nonce = _as_bytes(nonce, 16, "nonce")
    if not 0 <= int(counter) < 2**64:
        raise InputError("counter must fit in 64 bits")
    k = np.frombuffer(key, dtype=np.uint8)[None, :]
    n = np.frombuffer(nonce, dtype=np.uint8)[None, :]
    return echacha_blocks(k, n, np.array([counter], dtype=np.uint64), rounds)[0].tobytes()


def _check_nbits(nbits: int) -> int:
    if not isinstance(nbits, (int, np.integer)) or nbits <= 0 or nbits % 8:
        raise InputError(f"nbits must be a positive multiple of 8, got {nbits!r}")
    return int(nbits)


def echacha_keystreams(keys: np.ndarray, nonces: np.ndarray, rounds: int, nbits: int) -> np.ndarray:
    """Keystream bytes for many (key, nonce) pairs at once: (batch, nbits // 8) uint8."""
    nbits = _check_nbits(nbits)
    keys = np.atleast_2d(np.asarray(keys, dtype=np.uint8))
    nonces = np.atleast_2d(np.asarray(nonces, dtype=np.uint8))
    nbytes = nbits // 8
    nblocks = -(-nbytes // ECHACHA_BLOCK_BYTES)
    batch = keys.shape[0]
    ctr = np.tile(np.arange(nblocks, dtype=np.uint64), batch)
    blocks = echacha_blocks(
        np.repeat(keys, nblocks, axis=0), np.repeat(nonces, nblocks, axis=0), ctr, rounds
    )
    return blocks.reshape(batch, nblocks * ECHACHA_BLOCK_BYTES)[:, :nbytes]


@dataclass(frozen=True)
class Keystream:
    """Packed keystream bytes plus provenance.

    Bits are read most-significant-bit first within each byte.
    """

    data: bytes
    generator: str = "echacha20"
    rounds: int | None = DEFAULT_ROUNDS
    index: int = 0
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if len(self.data) == 0:
            raise InputError("keystream must be non-empty")

    @property
    def nbits(self) -> int:
        return 8 * len(self.data)

    @property
    def bits(self) -> np.ndarray:
        return np.unpackbits(np.frombuffer(self.data, dtype=np.uint8))

    def __len__(self) -> int:
        return self.nbits


def echacha_keystream(key, nonce, rounds: int = DEFAULT_ROUNDS, nbits: int = 2**16) -> Keystream:
    """Blocks with counters 0, 1, 2, ... concatenated and truncated to ``nbits``."""
    key = _as_bytes(key, 32, "key")
    nonce = _as_bytes(nonce, 16, "nonce")
    rounds = _check_rounds(rounds)
    data = echacha_keystreams(
        np.frombuffer(key, dtype=np.uint8), np.frombuffer(nonce, dtype=np.uint8), rounds, nbits
    )[0]
    return Keystream(data.tobytes(), "echacha20", rounds, meta={"key": key.hex(), "nonce": nonce.hex()})


# --- ChaCha20 (RFC 8439 layout) -------------------------------------------

def _qr4(a, b, c, d):
    a = a + b; d = rotl32(d ^ a, 16)
    c = c + d; b = rotl32(b ^ c, 12)
    a = a + b; d = rotl32(d ^ a, 8)
    c = c + d; b = rotl32(b ^ c, 7)
    return a, b, c, d


def chacha20_quarter_round(a: int, b: int, c: int, d: int) -> tuple[int, int, int, int]:
    out = _qr4(*(np.array([v & MASK32], dtype=np.uint32) for v in (a, b, c, d)))
    return tuple(int(v[0]) for v in out)


_CHACHA_QR = ((0, 4, 8, 12), (1, 5, 9, 13), (2, 6, 10, 14), (3, 7, 11, 15),
              (0, 5, 10, 15), (1, 6, 11, 12), (2, 7, 8, 13), (3, 4, 9, 14))


def chacha20_blocks(keys: np.ndarray, nonces: np.ndarray, counters: np.ndarray, rounds: int = DEFAULT_ROUNDS) -> np.ndarray:
    """Batched ChaCha block function; 96-bit nonces, 32-bit counters. Returns (batch, 64) uint8."""
    rounds = _check_rounds(rounds)
    counters = np.asarray(counters, dtype=np.uint64)
    if np.any(counters > MASK32):
        raise InputError("ChaCha20 counter must fit in 32 bits")
    batch = counters.shape[0]
    init = np.empty((16, batch), dtype=np.uint32)
    init[0:4] = np.array(CHACHA_CONSTANTS, dtype=np.uint32)[:, None]
    init[4:12] = _words(keys, 8)
    init[12] = counters.astype(np.uint32)
    init[13:16] = _words(nonces, 3)
    s = init.copy()
    for r in range(rounds):
        quads = _CHACHA_QR[:4] if r % 2 == 0 else _CHACHA_QR[4:]
        for idx in quads:
            out = _qr4(*(s[i] for i in idx))
            for i, v in zip(idx, out):
                s[i] = v
    out = (s + init).T.astype("<u4")
    return np.ascontiguousarray(out).view(np.uint8).reshape(-1, CHACHA_BLOCK_BYTES)


def chacha20_block(key, nonce96, counter32: int, rounds: int = DEFAULT_ROUNDS) -> bytes:
    key = _as_bytes(key, 32, "key")
    nonce96 = _as_bytes(nonce96, 12, "nonce")
    k = np.frombuffer(key, dtype=np.uint8)[None, :]
    n = np.frombuffer(nonce96, dtype=np.uint8)[None, :]
    return chacha20_blocks(k, n, np.array([counter32], dtype=np.uint64), rounds)[0].tobytes()


def chacha20_keystreams(keys: np.ndarray, nonces96: np.ndarray, rounds: int, nbits: int) -> np.ndarray:
    nbits = _check_nbits(nbits)
    keys = np.atleast_2d(np.asarray(keys, dtype=np.uint8))
    nonces96 = np.atleast_2d(np.asarray(nonces96, dtype=np.uint8))
    nbytes = nbits // 8
    nblocks = -(-nbytes // CHACHA_BLOCK_BYTES)
    batch = keys.shape[0]
    ctr = np.tile(np.arange(nblocks, dtype=np.uint64), batch)
    blocks = chacha20_blocks(
        np.repeat(keys, nblocks, axis=0), np.repeat(nonces96, nblocks, axis=0), ctr, rounds
    )
    return blocks.reshape(batch, nblocks * CHACHA_BLOCK_BYTES)[:, :nbytes]


def chacha20_keystream(key, nonce96, rounds: int = DEFAULT_ROUNDS, nbits: int = 2**16) -> Keystream:
    key = _as_bytes(key, 32, "key")
    nonce96 = _as_bytes(nonce96, 12, "nonce")
    data = chacha20_keystreams(
        np.frombuffer(key, dtype=np.uint8), np.frombuffer(nonce96, dtype=np.uint8), rounds, nbits
    )[0]
    return Keystream(data.tobytes(), "chacha20", rounds, meta={"key": key.hex(), "nonce": nonce96.hex()})


def xor_combine(keystream, data: bytes) -> bytes:
    """XOR ``data`` with the leading bytes of ``keystream``."""
    ks = keystream.data if isinstance(keystream, Keystream) else bytes(keystream)
    data = bytes(data)
    if len(ks) < len(data):
        raise InputError(f"keystream ({8 * len(ks)} bits) shorter than data ({8 * len(data)} bits)")
    a = np.frombuffer(ks, dtype=np.uint8, count=len(data))
    b = np.frombuffer(data, dtype=np.uint8)
    return (a ^ b).tobytes()
