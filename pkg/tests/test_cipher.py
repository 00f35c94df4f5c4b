import os
import struct

import numpy as np
import pytest

from nsc import cipher
from nsc.cipher import (
    ECHACHA_SIGMA,
    chacha20_block,
    chacha20_keystream,
    chacha20_quarter_round,
    dump_schedule,
    echacha_block,
    echacha_keystream,
    echacha_qr6,
    echacha_round_pair,
    rotl32,
    xor_combine,
)
from nsc.errors import ConfigError, InputError

M32 = 0xFFFFFFFF

# RFC 8439 section 2.3.2
RFC_KEY = bytes(range(32))
RFC_NONCE = bytes.fromhex("000000090000004a00000000")
RFC_BLOCK = bytes.fromhex(
    "10f1e7e4d13b5915500fdd1fa32071c4c7d1f4c733c068030422aa9ac3d46c4e"
    "d2826446079faa0914c2d705d98b02a2b5129cd1de164eb9cbd083e8a2503c4e"
)

# the pinned diagonal table (row, column) -> word 6*row + column
DIAGONALS = [
    [0, 7, 14, 21, 4, 11],
    [6, 13, 20, 3, 10, 17],
    [12, 19, 2, 9, 16, 23],
    [18, 1, 8, 15, 22, 5],
]


# --- oracles: plain-int reference code, no shared helpers -----------------

def ref_rotl(x, r):
    bits = [(x >> i) & 1 for i in range(32)]
    out = [0] * 32
    for i, b in enumerate(bits):
        out[(i + r) % 32] = b
    return sum(b << i for i, b in enumerate(out))


def ref_qr6(y):
    y0, y1, y2, y3, y4, y5 = y
    z1 = y1 ^ ref_rotl((y0 + y5) & M32, 2)
    z2 = y2 ^ ref_rotl((z1 + y3) & M32, 4)
    z3 = y3 ^ ref_rotl((z2 + y4) & M32, 7)
    z4 = y4 ^ ref_rotl((z3 + y0) & M32, 8)
    z5 = y5 ^ ref_rotl((z4 + z1) & M32, 12)
    z0 = y0 ^ ref_rotl((z5 + z2) & M32, 16)
    return [z0, z1, z2, z3, z4, z5]


def ref_echacha_block(key, nonce, counter, rounds):
    consts = list(struct.unpack("<10I", ECHACHA_SIGMA))
    init = (consts[:6] + list(struct.unpack("<8I", key)) + list(struct.unpack("<4I", nonce))
            + [counter & M32, counter >> 32] + consts[6:])
    s = list(init)
    for _ in range(rounds // 2):
        for row in range(4):
            idx = list(range(6 * row, 6 * row + 6))
            for i, v in zip(idx, ref_qr6([s[i] for i in idx])):
                s[i] = v
        for idx in DIAGONALS:
            for i, v in zip(idx, ref_qr6([s[i] for i in idx])):
                s[i] = v
    return struct.pack("<24I", *((a + b) & M32 for a, b in zip(s, init)))


# --- rotl32 ---------------------------------------------------------------

def test_rotl_examples():
    assert rotl32(0x00000001, 0) == 0x00000001
    assert rotl32(0x80000000, 1) == 0x00000001
    assert rotl32(0x00104042, 16) == 0x40420010
    assert ref_rotl(0x00104042, 16) == 0x40420010


def test_rotl_matches_bit_oracle():
    rng = np.random.default_rng(1)
    for x in rng.integers(0, 2**32, size=50, dtype=np.uint64).tolist():
        for r in range(32):
            assert rotl32(x, r) == ref_rotl(x, r)


def test_rotl_vectorized_and_range():
    xs = np.array([1, 0x80000000, 0xDEADBEEF], dtype=np.uint32)
    out = rotl32(xs, 5)
    assert out.dtype == np.uint32
    assert out.tolist() == [ref_rotl(int(x), 5) for x in xs]
    for bad in (-1, 32):
        with pytest.raises(InputError):
            rotl32(1, bad)


# --- QR6 and the round function ---------------------------------------------

def test_qr6_zero_fixed_point():
    assert tuple(echacha_qr6((0,) * 6)) == (0,) * 6


def test_qr6_unit_vector():
    z = echacha_qr6((1, 0, 0, 0, 0, 0))
    assert (z[1], z[2], z[3]) == (0x4, 0x40, 0x2000)
    assert list(z) == ref_qr6([1, 0, 0, 0, 0, 0])
    assert cipher.QR6_ROTATIONS == (2, 4, 7, 8, 12, 16)


def test_qr6_matches_oracle_on_random_words():
    rng = np.random.default_rng(2)
    words = rng.integers(0, 2**32, size=(200, 6), dtype=np.uint64)
    for w in words.tolist():
        assert list(echacha_qr6(tuple(w))) == ref_qr6(w)
    batched = echacha_qr6(words.T.astype(np.uint32))
    assert np.array_equal(np.asarray(batched).T, np.array([ref_qr6(w) for w in words.tolist()]))


def test_schedule_is_a_partition_and_pinned():
    assert [list(d) for d in cipher.DIAGONAL_SCHEDULE] == DIAGONALS
    assert sorted(i for d in DIAGONALS for i in d) == list(range(24))
    # each diagonal takes one word from every column
    for d in DIAGONALS:
        assert sorted(i % 6 for i in d) == list(range(6))
    table = dump_schedule()
    for k, d in enumerate(DIAGONALS):
        assert f"diagonal  {k}      " + " ".join(f"{i:2d}" for i in d) in table


def test_round_pair_zero_and_diffusion():
    z = np.zeros(24, dtype=np.uint32)
    assert not echacha_round_pair(z).any()
    p = z.copy()
    p[0] = 1
    out = echacha_round_pair(p)
    assert np.count_nonzero(out) > 1
    assert np.array_equal(out, echacha_round_pair(p))


# --- EChaCha blocks and keystreams ----------------------------------------------

def test_block_matches_reference_implementation():
    rng = np.random.default_rng(3)
    for rounds in (2, 4, 8, 20):
        key, nonce = rng.bytes(32), rng.bytes(16)
        counter = int(rng.integers(0, 2**63))
        assert echacha_block(key, nonce, counter, rounds) == ref_echacha_block(key, nonce, counter, rounds)


def test_block_rejects_odd_rounds():
    for r in (0, 3, 21, -2):
        with pytest.raises(ConfigError):
            echacha_block(bytes(32), bytes(16), 0, r)


def test_block_deterministic_and_feed_forward():
    key, nonce = os.urandom(32), os.urandom(16)
    assert echacha_block(key, nonce, 7) == echacha_block(key, nonce, 7)
    rng = np.random.default_rng(4)
    same = 0
    for _ in range(1000):
        key, nonce = rng.bytes(32), rng.bytes(16)
        consts = ECHACHA_SIGMA
        init = consts[:24] + key + nonce + bytes(8) + consts[24:]
        same += echacha_block(key, nonce, 0) == init
    assert same <= 10


def test_counter_neighbours_hamming_distance():
    rng = np.random.default_rng(5)
    keys = np.frombuffer(rng.bytes(32 * 1000), dtype=np.uint8).reshape(1000, 32)
    nonces = np.frombuffer(rng.bytes(16 * 1000), dtype=np.uint8).reshape(1000, 16)
    c = rng.integers(0, 2**40, size=1000, dtype=np.uint64)
    a = cipher.echacha_blocks(keys, nonces, c, 20)
    b = cipher.echacha_blocks(keys, nonces, c + 1, 20)
    dist = np.unpackbits(a ^ b, axis=1).sum(axis=1)
    assert a.shape == (1000, 96)
    assert abs(dist.mean() - 384) <= 40


def test_keystream_one_block_and_concatenation():
    key, nonce = bytes(range(32)), bytes(range(16))
    ks = echacha_keystream(key, nonce, 20, 768)
    assert ks.data == echacha_block(key, nonce, 0)
    long = echacha_keystream(key, nonce, 8, 8 * 250)
    expect = b"".join(echacha_block(key, nonce, i, 8) for i in range(3))[:250]
    assert long.data == expect
    assert long.nbits == 2000 and long.bits.size == 2000
    assert long.rounds == 8


def test_keystream_bits_msb_first():
    ks = echacha_keystream(bytes(32), bytes(16), 20, 8)
    byte = ks.data[0]
    assert ks.bits.tolist() == [(byte >> (7 - i)) & 1 for i in range(8)]


def test_keystream_length_errors():
    for n in (0, 7, 101, -8):
        with pytest.raises(InputError):
            echacha_keystream(bytes(32), bytes(16), 20, n)


def test_distinct_nonces_agree_half_the_time():
    key = bytes(32)
    a = echacha_keystream(key, bytes(16), 20, 2**16).bits
    b = echacha_keystream(key, b"\x01" + bytes(15), 20, 2**16).bits
    assert abs(np.mean(a == b) - 0.5) <= 0.01


def test_full_round_bit_balance():
    rng = np.random.default_rng(6)
    fails = 0
    for _ in range(100):
        bits = echacha_keystream(rng.bytes(32), rng.bytes(16), 20, 2**16).bits
        fails += abs(bits.mean() - 0.5) > 0.01
    assert fails <= 1


# --- ChaCha20 ---------------------------------------------------------------

def test_chacha_quarter_round_vector():
    assert chacha20_quarter_round(0x11111111, 0x01020304, 0x9B8D6F43, 0x01234567) == (
        0xEA2A92F4, 0xCB1CF8CE, 0x4581472E, 0x5881C4BB)


def test_chacha_rfc_block():
    assert chacha20_block(RFC_KEY, RFC_NONCE, 1) == RFC_BLOCK
    assert chacha20_block(bytes(32), bytes(12), 0) == chacha20_block(bytes(32), bytes(12), 0)


def test_chacha_keystream_matches_cryptography():
    algorithms = pytest.importorskip("cryptography.hazmat.primitives.ciphers.algorithms")
    from cryptography.hazmat.primitives.ciphers import Cipher

    rng = np.random.default_rng(7)
    for _ in range(5):
        key, nonce = rng.bytes(32), rng.bytes(12)
        enc = Cipher(algorithms.ChaCha20(key, bytes(4) + nonce), None).encryptor()
        assert chacha20_keystream(key, nonce, 20, 8 * 1000).data == enc.update(bytes(1000))


# --- xor_combine ------------------------------------------------------------------

def test_xor_combine():
    data = b"attack at dawn"
    ks = echacha_keystream(bytes(32), bytes(16), 20, 8 * 32)
    assert xor_combine(ks, xor_combine(ks, data)) == data
    assert xor_combine(bytes(16), data) == data
    assert xor_combine(b"\xff" * 16, data) == bytes(~b & 0xFF for b in data)
    with pytest.raises(InputError):
        xor_combine(b"\x00", data)
