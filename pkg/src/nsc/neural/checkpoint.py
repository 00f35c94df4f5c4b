"""Plain-text model checkpoints ("NSCMLP v1")."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from ..errors import InputError
from .mlp import MlpParameters, Standardizer

HEADER = "NSCMLP v1"


def _fmt(values) -> str:
    return " ".join(f"{v:.17g}" for v in np.ravel(values))


def dumps(params: MlpParameters, standardizer: Standardizer | None = None) -> str:
    lines = [HEADER, "layers " + " ".join(map(str, params.layer_sizes)),
             "activation relu sigmoid", f"init_seed {params.init_seed}"]
    for i, (W, b) in enumerate(zip(params.weights, params.biases), start=1):
        lines.append(f"W {i} {W.shape[0]} {W.shape[1]}")
        lines.extend(_fmt(row) for row in W)
        lines.append(f"b {i} {b.size}")
        lines.append(_fmt(b))
    if standardizer is not None:
        lines.append(f"standardizer {standardizer.mean.size}")
        lines.append("mean " + _fmt(standardizer.mean))
        lines.append("scale " + _fmt(standardizer.scale))
    lines.append("end")
    return "\n".join(lines) + "\n"


def loads(text: str) -> tuple[MlpParameters, Standardizer | None]:
    lines = iter(text.splitlines())

    def expect(prefix):
        line = next(lines, None)
        if line is None or not line.startswith(prefix):
            raise InputError(f"malformed checkpoint: expected {prefix!r}, got {line!r}")
        return line[len(prefix):].split()

    if next(lines, "").strip() != HEADER:
        raise InputError("not an NSCMLP v1 checkpoint")
    sizes = tuple(int(v) for v in expect("layers "))
    expect("activation ")
    seed = int(expect("init_seed ")[0])
    weights, biases = [], []
    for i in range(1, len(sizes)):
        _, rows, cols = expect("W ")
        W = np.array([[float(v) for v in next(lines).split()] for _ in range(int(rows))])
        expect("b ")
        b = np.array([float(v) for v in next(lines).split()])
        if W.shape != (sizes[i - 1], sizes[i]) or b.shape != (sizes[i],) or int(cols) != sizes[i]:
            raise InputError(f"malformed checkpoint: layer {i} shape mismatch")
        weights.append(W)
        biases.append(b)
    standardizer = None
    rest = next(lines, "end")
    if rest.startswith("standardizer"):
        mean = np.array([float(v) for v in expect("mean ")])
        scale = np.array([float(v) for v in expect("scale ")])
        standardizer = Standardizer(mean, scale)
    return MlpParameters(sizes, weights, biases, seed), standardizer


def save_model(path, params: MlpParameters, standardizer: Standardizer | None = None) -> None:
    Path(path).write_text(dumps(params, standardizer))


def load_model(path) -> tuple[MlpParameters, Standardizer | None]:
    return loads(Path(path).read_text())
