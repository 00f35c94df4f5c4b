"""Confusion counts, classification metrics, ROC/AUC and the distinguishing advantage."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import InputError
from .mlp import MlpParameters, forward

Z95 = 1.959963984540054


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @classmethod
    def from_predictions(cls, predicted, labels) -> "ConfusionCounts":
        pr = np.asarray(predicted).astype(bool).ravel()
        y = np.asarray(labels).astype(bool).ravel()
        if pr.shape != y.shape:
            raise InputError("predictions and labels must have equal length")
        return cls(int(np.sum(pr & y)), int(np.sum(~pr & ~y)), int(np.sum(pr & ~y)), int(np.sum(~pr & y)))


@dataclass(frozen=True)
class Metrics:
    """Metric values; ``None`` marks a ratio whose denominator is zero."""

    confusion: ConfusionCounts
    accuracy: float
    precision: float | None
    recall: float | None
    f1: float | None

    @property
    def undefined(self) -> tuple[str, ...]:
        return tuple(k for k in ("precision", "recall", "f1") if getattr(self, k) is None)


def metrics_from_confusion(cc: ConfusionCounts) -> Metrics:
    if cc.total == 0:
        raise InputError("no samples evaluated")
    accuracy = (cc.tp + cc.tn) / cc.total
    precision = cc.tp / (cc.tp + cc.fp) if cc.tp + cc.fp else None
    recall = cc.tp / (cc.tp + cc.fn) if cc.tp + cc.fn else None
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return Metrics(cc, accuracy, precision, recall, f1)


def evaluate(params: MlpParameters, data, threshold: float = 0.5) -> Metrics:
    """Hard decisions at ``threshold`` on a ``LabeledDataset`` (or (X, y) pair)."""
    X, y = (data.features, data.labels) if hasattr(data, "features") else data
    if len(y) == 0:
        raise InputError("nothing to evaluate")
    p = np.atleast_1d(forward(params, X))
    return metrics_from_confusion(ConfusionCounts.from_predictions(p >= threshold, y))


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))


def roc_auc(scores, labels) -> RocCurve:
    """Threshold sweep over the distinct scores (ties grouped), AUC by trapezoids."""
    s = np.asarray(scores, dtype=np.float64).ravel()
    y = np.asarray(labels).astype(bool).ravel()
    if s.shape != y.shape:
        raise InputError("scores and labels must have equal length")
    npos, nneg = int(y.sum()), int((~y).sum())
    if npos == 0 or nneg == 0:
        raise InputError("ROC needs both classes present")
    order = np.argsort(-s, kind="stable")
    s, y = s[order], y[order]
    last = np.r_[np.flatnonzero(np.diff(s)), s.size - 1]
    tp = np.cumsum(y)[last]
    fp = np.cumsum(~y)[last]
    tpr = np.r_[0.0, tp / npos]
    fpr = np.r_[0.0, fp / nneg]
    thresholds = np.r_[np.inf, s[last]]
    auc = float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))
    return RocCurve(fpr, tpr, thresholds, auc)


@dataclass(frozen=True)
class AdvantageEstimate:
    adv: float
    epsilon: float
    confidence_interval: tuple[float, float]
    p_cipher: float
    p_random: float
    n_cipher: int
    n_random: int


def advantage_from_predictions(pred_cipher, pred_random) -> AdvantageEstimate:
    """|Pr[M=1 | cipher] - Pr[M=1 | random]| from hard decisions.

    ``epsilon`` is the class-balanced accuracy minus 1/2, so ``adv == |2 epsilon|``
    whatever the two set sizes are. The interval is a normal approximation
    for the difference of two proportions, folded onto |.| and clipped to [0, 1].
    """
    c = np.asarray(pred_cipher).astype(bool).ravel()
    r = np.asarray(pred_random).astype(bool).ravel()
    if c.size == 0 or r.size == 0:
        raise InputError("both the cipher and the random set must be non-empty")
    pc, pr = float(c.mean()), float(r.mean())
    diff = pc - pr
    balanced_accuracy = (pc + (1.0 - pr)) / 2.0
    se = math.sqrt(pc * (1 - pc) / c.size + pr * (1 - pr) / r.size)
    lo, hi = diff - Z95 * se, diff + Z95 * se
    if lo <= 0.0 <= hi:
        ci = (0.0, max(-lo, hi))
    else:
        ci = tuple(sorted((abs(lo), abs(hi))))
    ci = (max(0.0, ci[0]), min(1.0, ci[1]))
    return AdvantageEstimate(abs(diff), balanced_accuracy - 0.5, ci, pc, pr, int(c.size), int(r.size))


def advantage(params: MlpParameters, cipher_set, random_set, threshold: float = 0.5) -> AdvantageEstimate:
    """Empirical distinguishing advantage of the classifier on two feature sets."""
    Xc = getattr(cipher_set, "features", cipher_set)
    Xr = getattr(random_set, "features", random_set)
    if len(Xc) == 0 or len(Xr) == 0:
        raise InputError("both the cipher and the random set must be non-empty")
    return advantage_from_predictions(
        np.atleast_1d(forward(params, Xc)) >= threshold, np.atleast_1d(forward(params, Xr)) >= threshold
    )
