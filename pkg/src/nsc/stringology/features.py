"""The feature map from a bit string to a fixed-length real vector, plus feature files.

Schema v1 (d = 280), in column order:

    A  256  normalized 8-gram frequencies (sum to 1)
    B   12  for m in (8, 16, 32): chi-square z-score, entropy / m,
            distinct-window ratio, max multiplicity / expected max
    C    1  longest repeated substring / (2 log2 n)
    D    8  serial correlation at lags 1, 2, 4, 7, 8, 12, 16, 32
    E    3  variance, min, max of ones-fraction over 64 blocks
"""
from __future__ import annotations

import csv
import io
import math
import os
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigError, InputError, NSCError
from .bitstring import as_bits
from .ngrams import chi_square_zscore, collision_stats, ngram_histogram, shannon_entropy
from .positional import SERIAL_LAGS, block_density, serial_correlation
from .repeats import longest_repeated_substring

MGRAM_LENGTHS = (8, 16, 32)
DENSITY_BLOCKS = 64


@dataclass(frozen=True)
class FeatureSchema:
    version: str
    groups: tuple[tuple[str, int], ...]
    min_bits: int = 1 << 12

    @property
    def d(self) -> int:
        return sum(dim for _, dim in self.groups)

    @property
    def number(self) -> int:
        return int(self.version.lstrip("v"))

    def slices(self) -> dict[str, slice]:
        out, start = {}, 0
        for name, dim in self.groups:
            out[name] = slice(start, start + dim)
            start += dim
        return out

    def column_names(self) -> list[str]:
        return [f"x_{i:04d}" for i in range(1, self.d + 1)]


SCHEMA_V1 = FeatureSchema(
    "v1",
    (
        ("mgram8_frequency", 256),
        ("mgram_statistics", 4 * len(MGRAM_LENGTHS)),
        ("longest_repeat", 1),
        ("serial_correlation", len(SERIAL_LAGS)),
        ("block_density", 3),
    ),
)

SCHEMAS = {SCHEMA_V1.version: SCHEMA_V1}


def get_schema(version: str | FeatureSchema) -> FeatureSchema:
    if isinstance(version, FeatureSchema):
        return version
    try:
        return SCHEMAS[version]
    except KeyError:
        raise ConfigError(f"unknown feature schema {version!r}; known: {sorted(SCHEMAS)}") from None


@dataclass(frozen=True)
class FeatureVector:
    values: np.ndarray
    schema: FeatureSchema = SCHEMA_V1
    source: str | None = None

    def __len__(self) -> int:
        return self.values.size


def _features_v1(bits: np.ndarray) -> np.ndarray:
    n = bits.size
    out = np.empty(SCHEMA_V1.d)
    stats = []
    for m in MGRAM_LENGTHS:
        h = ngram_histogram(bits, m)
        if m == 8:
            out[:256] = h.counts / h.windows
        distinct, peak = collision_stats(h, m)
        expected_max = max(1.0, h.expected)
        stats += [chi_square_zscore(h), shannon_entropy(h) / m, distinct, peak / expected_max]
    out[256:268] = stats
    out[268] = longest_repeated_substring(bits) / (2 * math.log2(n))
    out[269:277] = [serial_correlation(bits, lag) for lag in SERIAL_LAGS]
    bd = block_density(bits, DENSITY_BLOCKS)
    out[277:280] = (bd.variance, bd.min, bd.max)
    return out


def extract_features(s, schema: FeatureSchema | str = SCHEMA_V1, source: str | None = None) -> FeatureVector:
    """Map a bit string to its feature vector under ``schema``."""
    schema = get_schema(schema)
    bits = as_bits(s)
    if bits.size < schema.min_bits:
        raise InputError(f"schema {schema.version} needs at least {schema.min_bits} bits, got {bits.size}")
    values = _features_v1(bits)
    if not np.all(np.isfinite(values)):
        raise NSCError(f"non-finite feature value for source {source!r}")
    return FeatureVector(values, schema, source)


def _extract_packed(args) -> np.ndarray:
    data, version = args
    return extract_features(data, version).values


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("NSC_THREADS", "1")))
    except ValueError:
        return 1


def extract_matrix(sequences, schema: FeatureSchema | str = SCHEMA_V1, workers: int | None = None) -> np.ndarray:
    """Feature matrix (rows, d) for an iterable of packed byte strings or bit arrays.

    ``workers`` > 1 spreads rows over a process pool; the default comes from
    the NSC_THREADS environment variable.
    """
    schema = get_schema(schema)
    workers = default_workers() if workers is None else workers
    items = [(s, schema.version) for s in sequences]
    if workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_extract_packed, items, chunksize=max(1, len(items) // (4 * workers))))
    else:
        rows = [_extract_packed(it) for it in items]
    if not rows:
        return np.empty((0, schema.d))
    return np.vstack(rows)


# --- feature files ---------------------------------------------------------

NSCF_MAGIC = b"NSCF"
NSCF_FORMAT = 1


@dataclass
class FeatureMatrix:
    """Rows of feature vectors with their labels and source ids."""

    values: np.ndarray
    labels: np.ndarray
    source_ids: list[str]
    schema: FeatureSchema = SCHEMA_V1
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.values.ndim != 2 or self.values.shape[1] != self.schema.d:
            raise InputError(f"feature matrix must be (rows, {self.schema.d})")
        if len(self.labels) != len(self.values) or len(self.source_ids) != len(self.values):
            raise InputError("labels, source ids and rows must align")

    def __len__(self) -> int:
        return len(self.values)

    def subset(self, idx) -> "FeatureMatrix":
        idx = np.asarray(idx, dtype=np.int64)
        return FeatureMatrix(self.values[idx], self.labels[idx], [self.source_ids[i] for i in idx], self.schema)


def write_csv(fm: FeatureMatrix, path) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["schema_version", "source_id", "label", *fm.schema.column_names()])
    for sid, label, row in zip(fm.source_ids, fm.labels.tolist(), fm.values):
        w.writerow([fm.schema.version, sid, label, *(repr(float(v)) for v in row)])
    Path(path).write_text(buf.getvalue())


def read_csv(path) -> FeatureMatrix:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    header, body = rows[0], rows[1:]
    if header[:3] != ["schema_version", "source_id", "label"]:
        raise InputError(f"{path}: not a feature CSV")
    versions = {r[0] for r in body} or {"v1"}
    if len(versions) != 1:
        raise InputError(f"{path}: mixed schema versions {sorted(versions)}")
    schema = get_schema(versions.pop())
    if len(header) - 3 != schema.d:
        raise InputError(f"{path}: expected {schema.d} feature columns")
    values = np.array([[float(v) for v in r[3:]] for r in body]).reshape(len(body), schema.d)
    return FeatureMatrix(values, [int(r[2]) for r in body], [r[1] for r in body], schema)


def write_nscf(fm: FeatureMatrix, path) -> None:
    """Binary layout (little-endian): magic, u32 format, u32 schema number,
    u32 d, u32 rows, u8 labels[rows], u32 id-blob length, UTF-8 ids joined
    by newlines, f64 values[rows * d] row-major."""
    ids = "\n".join(fm.source_ids).encode()
    with open(path, "wb") as f:
        f.write(NSCF_MAGIC)
        f.write(struct.pack("<IIII", NSCF_FORMAT, fm.schema.number, fm.schema.d, len(fm)))
        f.write(fm.labels.astype(np.uint8).tobytes())
        f.write(struct.pack("<I", len(ids)))
        f.write(ids)
        f.write(np.ascontiguousarray(fm.values, dtype="<f8").tobytes())


def read_nscf(path) -> FeatureMatrix:
    raw = Path(path).read_bytes()
    if raw[:4] != NSCF_MAGIC:
        raise InputError(f"{path}: bad magic")
    fmt, number, d, rows = struct.unpack_from("<IIII", raw, 4)
    if fmt != NSCF_FORMAT:
        raise InputError(f"{path}: unsupported format version {fmt}")
    schema = get_schema(f"v{number}")
    if d != schema.d:
        raise InputError(f"{path}: dimension {d} does not match schema {schema.version}")
    off = 20
    labels = np.frombuffer(raw, dtype=np.uint8, count=rows, offset=off).astype(np.int64)
    off += rows
    (nid,) = struct.unpack_from("<I", raw, off)
    off += 4
    ids = raw[off: off + nid].decode().split("\n") if rows else []
    off += nid
    values = np.frombuffer(raw, dtype="<f8", count=rows * d, offset=off).reshape(rows, d)
    return FeatureMatrix(values.astype(np.float64), labels, ids, schema)
