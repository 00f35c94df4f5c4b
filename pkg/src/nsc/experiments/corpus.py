"""Keystream corpora on disk, described by a JSON manifest written last."""
from __future__ import annotations

import hashlib
import json
import os
import secrets
import zlib
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from .. import __version__
from ..cipher import Keystream, chacha20_keystreams, echacha_keystreams
from ..errors import ConfigError, InputError, NSCError
from .config import ExperimentConfig

GENERATORS = ("echacha20", "chacha20", "urandom")
CHACHA_NONCE_CONVENTION = "first 12 bytes of the sampled 128-bit nonce; 32-bit block counter from 0"
# keeps seeded manifests byte-identical between runs
SEEDED_TIMESTAMP = "1970-01-01T00:00:00+00:00"
_CHUNK = 512


@dataclass(frozen=True)
class CorpusGroup:
    name: str
    generator: str
    rounds: int | None
    count: int
    label: int


@dataclass
class ManifestEntry:
    id: str
    path: str
    generator: str
    rounds: int | None
    key_hex: str | None
    nonce_hex: str | None
    n_bits: int
    label: int
    group: str
    sha256: str = ""


@dataclass
class CorpusManifest:
    entries: list[ManifestEntry]
    created_at: str
    tool_version: str
    global_seed: int
    rng_mode: str = "seeded"
    task: str = "distinguish"
    seeds: dict = field(default_factory=dict)
    conventions: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=False) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "CorpusManifest":
        d = dict(d)
        d["entries"] = [ManifestEntry(**e) for e in d["entries"]]
        return cls(**d)

    def groups(self) -> list[str]:
        seen = []
        for e in self.entries:
            if e.group not in seen:
                seen.append(e.group)
        return seen

    def select(self, group: str) -> list[ManifestEntry]:
        return [e for e in self.entries if e.group == group]


def corpus_groups(cfg: ExperimentConfig) -> list[CorpusGroup]:
    n = cfg.sequences_per_class
    if cfg.task == "null":
        return [CorpusGroup("urandom-a", "urandom", None, n, 0), CorpusGroup("urandom-b", "urandom", None, n, 0)]
    groups = []
    if cfg.task == "variants":
        r = cfg.rounds_list[0]
        groups.append(CorpusGroup(f"chacha20-r{r}", "chacha20", r, n, 1))
        groups.append(CorpusGroup(f"echacha20-r{r}", "echacha20", r, n, 1))
    else:
        groups += [CorpusGroup(f"echacha20-r{r}", "echacha20", r, n, 1) for r in cfg.rounds_list]
    groups.append(CorpusGroup("urandom", "urandom", None, n, 0))
    return groups


def _group_rng(seed: int, group: str) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(zlib.crc32(group.encode()),))
    return np.random.Generator(np.random.PCG64(ss))


def _random_bytes(rng: np.random.Generator | None, shape) -> np.ndarray:
    if rng is None:
        size = int(np.prod(shape))
        return np.frombuffer(secrets.token_bytes(size), dtype=np.uint8).reshape(shape)
    return rng.integers(0, 256, size=shape, dtype=np.uint8)


def uniform_source(n_bits: int, mode: str = "seeded", rng: np.random.Generator | None = None, count: int | None = None):
    """Uniform random bits standing in for U_n.

    ``mode="os"`` reads the operating-system CSPRNG; ``mode="seeded"`` uses
    the given numpy PCG64 generator (a fresh default one if omitted). With
    ``count`` set, returns a (count, n_bits // 8) uint8 array; otherwise a
    single ``Keystream`` tagged ``urandom``.
    """
    if n_bits <= 0 or n_bits % 8:
        raise InputError(f"n_bits must be a positive multiple of 8, got {n_bits}")
    if mode not in ("seeded", "os"):
        raise ConfigError(f"unknown uniform source mode {mode!r}")
    if mode == "seeded" and rng is None:
        rng = np.random.default_rng()
    shape = (1 if count is None else count, n_bits // 8)
    try:
        data = _random_bytes(None if mode == "os" else rng, shape)
    except OSError as exc:
        raise NSCError(f"entropy source unavailable: {exc}") from exc
    if count is None:
        return Keystream(data[0].tobytes(), "urandom", None, meta={"mode": mode})
    return data


def _generate_group(group: CorpusGroup, cfg: ExperimentConfig):
    """Yield (key, nonce, data) rows for one group, in chunks."""
    seeds = cfg.seeds
    seeded = cfg.rng_mode == "seeded"
    if group.generator == "urandom":
        rng = _group_rng(seeds["uniform"], group.name) if seeded else None
    else:
        rng = _group_rng(seeds["keys"], group.name) if seeded else None
    done = 0
    while done < group.count:
        k = min(_CHUNK, group.count - done)
        if group.generator == "urandom":
            data = uniform_source(cfg.n_bits, cfg.rng_mode, rng, count=k)
            keys = nonces = [None] * k
        else:
            keys = _random_bytes(rng, (k, 32))
            nonces = _random_bytes(rng, (k, 16))
            if group.generator == "echacha20":
                data = echacha_keystreams(keys, nonces, group.rounds, cfg.n_bits)
            else:
                nonces = nonces[:, :12]
                data = chacha20_keystreams(keys, nonces, group.rounds, cfg.n_bits)
        for i in range(k):
            yield (None if keys[i] is None else keys[i].tobytes().hex(),
                   None if nonces[i] is None else nonces[i].tobytes().hex(),
                   data[i].tobytes())
        done += k


def generate_corpus(cfg: ExperimentConfig, out_dir) -> CorpusManifest:
    """Write corpus/<id>.ks files and then corpus/manifest.json.

    On any failure the files written so far are removed and no manifest is
    left behind.
    """
    root = Path(out_dir)
    corpus = root / "corpus"
    corpus.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    entries = []
    try:
        for group in corpus_groups(cfg):
            for i, (key, nonce, data) in enumerate(_generate_group(group, cfg)):
                eid = f"{group.name}-{i:05d}"
                path = corpus / f"{eid}.ks"
                path.write_bytes(data)
                written.append(path)
                entries.append(ManifestEntry(
                    eid, f"corpus/{eid}.ks", group.generator, group.rounds, key, nonce,
                    cfg.n_bits, group.label, group.name, hashlib.sha256(data).hexdigest(),
                ))
        created = SEEDED_TIMESTAMP if cfg.rng_mode == "seeded" else datetime.now(timezone.utc).isoformat()
        manifest = CorpusManifest(
            entries, created, __version__, cfg.global_seed, cfg.rng_mode, cfg.task,
            seeds={k: v for k, v in cfg.seeds.items() if k in ("global", "keys", "uniform")},
            conventions={"bit_order": "msb-first within each byte", "byte_order": "little-endian words",
                         "echacha20_counter": "64-bit block counter from 0",
                         "chacha20_nonce": CHACHA_NONCE_CONVENTION},
            config=cfg.to_dict(),
        )
        tmp = corpus / "manifest.json.tmp"
        tmp.write_text(manifest.to_json())
        os.replace(tmp, corpus / "manifest.json")
    except BaseException:
        for p in written:
            p.unlink(missing_ok=True)
        (corpus / "manifest.json.tmp").unlink(missing_ok=True)
        raise
    return manifest


def manifest_path(out_dir) -> Path:
    return Path(out_dir) / "corpus" / "manifest.json"


def load_manifest(out_dir, verify: bool = True) -> CorpusManifest:
    """Read and validate a manifest (unique ids, file sizes, labels, checksums)."""
    path = manifest_path(out_dir)
    if not path.exists():
        raise NSCError(f"no corpus manifest at {path}")
    manifest = CorpusManifest.from_dict(json.loads(path.read_text()))
    ids = [e.id for e in manifest.entries]
    if len(set(ids)) != len(ids):
        raise NSCError("manifest ids are not unique")
    for e in manifest.entries:
        if e.generator not in GENERATORS:
            raise NSCError(f"{e.id}: unknown generator {e.generator!r}")
        if e.label != (0 if e.generator == "urandom" else 1):
            raise NSCError(f"{e.id}: label {e.label} inconsistent with generator {e.generator}")
        if verify:
            f = Path(out_dir) / e.path
            if not f.exists() or f.stat().st_size != e.n_bits // 8:
                raise NSCError(f"{e.id}: missing or wrong-sized file {f}")
            if e.sha256 and hashlib.sha256(f.read_bytes()).hexdigest() != e.sha256:
                raise NSCError(f"{e.id}: checksum mismatch")
    return manifest


def read_sequence(out_dir, entry: ManifestEntry) -> bytes:
    return (Path(out_dir) / entry.path).read_bytes()
