"""Stratified train / validation / test assignment."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

SPLITS = ("train", "validation", "test")
DEFAULT_RATIOS = (0.70, 0.15, 0.15)
MIN_PER_CLASS = 20


def largest_remainder(n: int, ratios=DEFAULT_RATIOS) -> list[int]:
    """Integer quotas summing to ``n``; leftovers go to the largest fractional parts, earlier splits first on ties."""
    raw = [n * r for r in ratios]
    base = [int(np.floor(q)) for q in raw]
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - base[i]), i))
    for i in order[: n - sum(base)]:
        base[i] += 1
    return base


@dataclass(frozen=True)
class SplitAssignment:
    assignment: tuple[str, ...]
    seed: int

    def indices(self, split: str) -> np.ndarray:
        if split not in SPLITS:
            raise ConfigError(f"unknown split {split!r}")
        return np.array([i for i, a in enumerate(self.assignment) if a == split], dtype=np.int64)

    def to_dict(self, ids=None) -> dict:
        ids = list(ids) if ids is not None else [str(i) for i in range(len(self.assignment))]
        return {"seed": self.seed, "assignment": dict(zip(ids, self.assignment))}

    @classmethod
    def from_dict(cls, d: dict, ids) -> "SplitAssignment":
        amap = d["assignment"]
        return cls(tuple(amap[i] for i in ids), int(d["seed"]))


def split_dataset(labels, ratios=DEFAULT_RATIOS, seed: int = 0, min_per_class: int = MIN_PER_CLASS) -> SplitAssignment:
    """Shuffle each class with a seeded generator and cut it by ``ratios``."""
    labels = np.asarray(labels)
    if abs(sum(ratios) - 1.0) > 1e-9 or len(ratios) != 3:
        raise ConfigError("ratios must be three fractions summing to 1")
    out = np.empty(labels.size, dtype=object)
    rng = np.random.default_rng(seed)
    classes = np.unique(labels)
    if classes.size < 2:
        raise ConfigError("split needs two classes")
    for c in classes:
        idx = np.flatnonzero(labels == c)
        if idx.size < min_per_class:
            raise ConfigError(f"class {c} has {idx.size} entries; need at least {min_per_class}")
        idx = idx[rng.permutation(idx.size)]
        start = 0
        for name, q in zip(SPLITS, largest_remainder(idx.size, ratios)):
            out[idx[start: start + q]] = name
            start += q
    return SplitAssignment(tuple(out.tolist()), seed)
