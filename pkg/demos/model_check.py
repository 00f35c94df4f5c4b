"""Gradient check and a separable toy problem for the MLP.

    python3 demos/model_check.py
"""
import numpy as np

from nsc.neural import LabeledDataset, TrainConfig, evaluate, train
from nsc.neural.mlp import gradients, init_parameters, objective

rng = np.random.default_rng(0)
X = rng.normal(size=(16, 6))
y = (rng.random(16) > 0.5).astype(np.int64)
params = init_parameters([6, 4, 1], seed=3)

# Central differences against the analytic gradient, every weight of layer 0.
h, worst = 1e-6, 0.0
gw = gradients(params, X, y)[0][0]
for idx in np.ndindex(*gw.shape):
    w = params.weights[0]
    old = w[idx]
    w[idx] = old + h
    up = objective(params, X, y)
    w[idx] = old - h
    down = objective(params, X, y)
    w[idx] = old
    num = (up - down) / (2 * h)
    worst = max(worst, abs(num - gw[idx]) / max(1e-8, abs(num) + abs(gw[idx])))
print(f"max relative gradient error: {worst:.2e}")

# Two Gaussian blobs, well apart.
n = 300
y = np.r_[np.ones(n), np.zeros(n)].astype(np.int64)
X = rng.normal(size=(2 * n, 2)) + np.where(y[:, None] == 1, 2.5, -2.5)
order = rng.permutation(2 * n)
X, y = X[order], y[order]
tr, va, te = slice(0, 400), slice(400, 500), slice(500, None)
params, history = train(LabeledDataset(X[tr], y[tr]), LabeledDataset(X[va], y[va]), TrainConfig(epochs=40))
m = evaluate(params, LabeledDataset(X[te], y[te]))
print(f"blobs: test accuracy {m.accuracy:.3f} after {len(history)} epochs")
