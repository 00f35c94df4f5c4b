"""Feed-forward distinguisher: rectifier hidden layers, sigmoid output, plain mini-batch SGD."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, InputError, TrainingError

DEFAULT_HIDDEN = (64, 32)
PROB_CLAMP = 1e-12
# forward() output is kept strictly inside (0, 1)
_OUT_EPS = 1e-15


@dataclass
class MlpParameters:
    layer_sizes: tuple[int, ...]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    init_seed: int = 0

    def copy(self) -> "MlpParameters":
        return MlpParameters(self.layer_sizes, [w.copy() for w in self.weights],
                             [b.copy() for b in self.biases], self.init_seed)

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.01
    epochs: int = 300
    batch_size: int = 64
    seed: int = 0
    l2: float = 1e-4

    def __post_init__(self):
        if self.learning_rate <= 0 or self.epochs < 1 or self.batch_size < 1 or self.l2 < 0:
            raise ConfigError(f"invalid training configuration {self}")


@dataclass
class LabeledDataset:
    features: np.ndarray
    labels: np.ndarray
    source_ids: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        self.labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if len(self.features) != len(self.labels):
            raise InputError("features and labels must have the same number of rows")
        if self.labels.size and not np.isin(self.labels, (0, 1)).all():
            raise InputError("labels must be 0 or 1")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def class_counts(self) -> tuple[int, int]:
        ones = int(self.labels.sum())
        return len(self.labels) - ones, ones


def init_parameters(layer_sizes, seed: int = 0) -> MlpParameters:
    """He-scaled normal weights, zero biases."""
    sizes = tuple(int(s) for s in layer_sizes)
    if len(sizes) < 2 or min(sizes) < 1:
        raise ConfigError(f"layer sizes must list at least input and output widths, got {layer_sizes!r}")
    if sizes[-1] != 1:
        raise ConfigError("the output layer must have width 1")
    rng = np.random.default_rng(seed)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        weights.append(rng.standard_normal((fan_in, fan_out)) * math.sqrt(2.0 / fan_in))
        biases.append(np.zeros(fan_out))
    return MlpParameters(sizes, weights, biases, seed)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _forward_all(params: MlpParameters, X: np.ndarray) -> list[np.ndarray]:
    acts = [X]
    a = X
    last = len(params.weights) - 1
    for i, (W, b) in enumerate(zip(params.weights, params.biases)):
        z = a @ W + b
        a = _sigmoid(z) if i == last else np.maximum(z, 0.0)
        acts.append(a)
    return acts


def forward(params: MlpParameters, x) -> np.ndarray | float:
    """Probability of class 1 for one vector (returns float) or a matrix of rows."""
    x = np.asarray(getattr(x, "values", x), dtype=np.float64)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != params.n_inputs:
        raise InputError(f"expected {params.n_inputs} features, got {X.shape[1]}")
    p = np.clip(_forward_all(params, X)[-1][:, 0], _OUT_EPS, 1.0 - _OUT_EPS)
    return float(p[0]) if single else p


def predict(params: MlpParameters, X, threshold: float = 0.5) -> np.ndarray:
    return (np.atleast_1d(forward(params, X)) >= threshold).astype(np.int64)


def loss_bce(probabilities, labels) -> float:
    p = np.asarray(probabilities, dtype=np.float64).ravel()
    y = np.asarray(labels, dtype=np.float64).ravel()
    if p.shape != y.shape:
        raise InputError("probabilities and labels must have equal length")
    p = np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log1p(-p))))


def objective(params: MlpParameters, X, y, l2: float = 0.0) -> float:
    """Mean BCE plus l2 * sum of squared weights (biases excluded)."""
    p = _forward_all(params, np.atleast_2d(X))[-1][:, 0]
    return loss_bce(p, y) + l2 * sum(float(np.sum(W * W)) for W in params.weights)


def gradients(params: MlpParameters, X, y, l2: float = 0.0) -> list[tuple[np.ndarray, np.ndarray]]:
    """Exact gradient of ``objective`` as (dW, db) per layer."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.float64).ravel()
    if len(X) == 0:
        raise InputError("empty batch")
    acts = _forward_all(params, X)
    p = acts[-1][:, 0]
    live = (p > PROB_CLAMP) & (p < 1.0 - PROB_CLAMP)
    delta = np.where(live, (p - y) / len(y), 0.0)[:, None]
    grads = []
    for i in range(len(params.weights) - 1, -1, -1):
        W = params.weights[i]
        grads.append((acts[i].T @ delta + 2.0 * l2 * W, delta.sum(axis=0)))
        if i:
            delta = (delta @ W.T) * (acts[i] > 0)
    grads.reverse()
    return grads


def _accuracy(p: np.ndarray, y: np.ndarray) -> float:
    return float(np.mean((p >= 0.5) == (y == 1)))


def train(train_set: LabeledDataset, val_set: LabeledDataset | None, cfg: TrainConfig = TrainConfig(),
          hidden: tuple[int, ...] = DEFAULT_HIDDEN):
    """Mini-batch gradient descent with seeded shuffling.

    Returns the parameters from the epoch with the lowest validation loss
    (training loss when no validation set is given) and the per-epoch
    history as a list of dicts.
    """
    n0, n1 = train_set.class_counts
    if min(n0, n1) < 2:
        raise TrainingError(f"need at least 2 samples per class, got {n0} / {n1}")
    X, y = train_set.features, train_set.labels.astype(np.float64)
    params = init_parameters((X.shape[1], *hidden, 1), cfg.seed)
    rng = np.random.default_rng(cfg.seed)
    history = []
    best, best_loss = params.copy(), math.inf
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(len(y))
        for start in range(0, len(y), cfg.batch_size):
            idx = order[start: start + cfg.batch_size]
            for (dW, db), W, b in zip(gradients(params, X[idx], y[idx], cfg.l2), params.weights, params.biases):
                W -= cfg.learning_rate * dW
                b -= cfg.learning_rate * db
        p_train = forward(params, X)
        rec = {"epoch": epoch, "train_loss": loss_bce(p_train, y), "train_accuracy": _accuracy(p_train, y)}
        if val_set is not None and len(val_set):
            p_val = forward(params, val_set.features)
            rec["val_loss"] = loss_bce(p_val, val_set.labels)
            rec["val_accuracy"] = _accuracy(p_val, val_set.labels)
        score = rec.get("val_loss", rec["train_loss"])
        if not math.isfinite(score) or not all(np.isfinite(W).all() for W in params.weights):
            raise TrainingError(f"training diverged at epoch {epoch}")
        if score < best_loss:
            best, best_loss = params.copy(), score
        history.append(rec)
    return best, history


def logistic_baseline(train_set: LabeledDataset, val_set: LabeledDataset | None, cfg: TrainConfig = TrainConfig()):
    """Same training loop with no hidden layers (a d -> 1 sigmoid)."""
    return train(train_set, val_set, cfg, hidden=())


@dataclass
class Standardizer:
    """Per-column z-scoring fitted on a training split.

    Columns listed in ``passthrough`` keep mean 0 / scale 1.
    """

    mean: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X, passthrough: slice | None = None) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        mean = X.mean(axis=0)
        scale = X.std(axis=0)
        scale[~(scale > 0)] = 1.0
        if passthrough is not None:
            mean[passthrough] = 0.0
            scale[passthrough] = 1.0
        return cls(mean, scale)

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale
