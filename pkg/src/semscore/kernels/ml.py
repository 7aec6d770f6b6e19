"""ML-class kernels: MLP regressor, SVM decision function, logistic model.

D1 trains per seed; D2 and D3 are deterministic convex fits on frozen,
antisymmetric datasets so their decision functions carry exact odd symmetry.
"""

from __future__ import annotations

import numpy as np

from . import _nets
from ..rng import stream

# ---------------------------------------------------------------------------
# D1: MLP regression on a frozen noisy dataset; prediction-at-x observable.

D1_DOMAIN = (-1.0, 1.0)

_D1_NOISE = stream("d1-frozen-noise").normal(0.0, 1.0, size=28)


def d1_curve(t):
    t = np.asarray(t, dtype=np.float64)
    return 0.6 * t + 0.35 * np.sin(2.5 * t)


D1_REFERENCE = {
    "n_train": 28,
    "epochs": 280,
    "lr": 0.2,
    "hidden": 10,
    "activation": "tanh",
    "init_scale": 1.0,
    "init_tag": "d1-init",
    "noise_amp": 0.02,
    "label_flip": False,   # TF: the training labels are negated
    "mask_period": 0,      # TF
    "phase_drift": 0.0,
    "y_noise_amp": 0.0,    # CE
    "l2": 1e-4,
    "l2_spike_every": 0,
    "l2_spike_value": 1.0,
    "grad_omit": "none",   # CE exemplar: omit the output-bias gradient
    "optimizer": "gd",
    "loss": "mse",
    "lr_decay": 1.0,
    "data_stride": 1,
    "dead_unit": -1,
}


def _d1_yfn(p):
    def y_fn(t, epoch):
        base = d1_curve(t + p["phase_drift"] * epoch)
        noise = p["noise_amp"] * _D1_NOISE[: t.size]
        y = base + noise
        if p["y_noise_amp"]:
            y = y + p["y_noise_amp"] * np.cos(5.0 * t)
        if p["label_flip"]:
            y = -y
        return y
    return y_fn


def d1_train_points(p):
    return np.linspace(-1.0, 1.0, p["n_train"])[:: p["data_stride"]]


def d1_fit(p, seed, level=0, snapshot_epochs=()):
    t = d1_train_points(p)
    cfg = {**p, "epochs": p["epochs"] * 2 ** level}
    return _nets.train(t, _d1_yfn(p), cfg, seed, snapshot_epochs)


def d1_evaluate_fitted(x, p, weights):
    return _nets.predict(weights, x, p["activation"], p["dead_unit"])


# ---------------------------------------------------------------------------
# D2: soft-margin kernel SVM (no-bias dual form) on antisymmetric labels.

D2_DOMAIN = (-1.5, 1.5)

_D2_POS = np.array([0.08, 0.2, 0.35, 0.5, 0.65, 0.8, 0.95, 1.1, 1.25, 1.4])

D2_REFERENCE = {
    "C": 5.0,
    "gamma": 1.0,
    "iters": 200,
    "eta": 0.05,
    "kernel": "rbf",        # rbf | linear
    "sign_flip_band": 0.0,  # OS: decision value negated inside this band
    "alpha_clip_frac": 0.0,  # SI: dual weights clipped at frac*C
    "sv_drop_n": 0,          # SI: smallest dual weights zeroed
    "label_flip_idx": -1,    # CE: one training label flipped
    "bias_drift": 0.0,       # CE
}


def d2_data(p):
    t = np.concatenate([_D2_POS, -_D2_POS])
    y = np.concatenate([np.ones_like(_D2_POS), -np.ones_like(_D2_POS)])
    if 0 <= p["label_flip_idx"] < t.size:
        y = y.copy()
        y[p["label_flip_idx"]] = -y[p["label_flip_idx"]]
    return t, y


def _d2_kernel(a, b, p):
    if p["kernel"] == "linear":
        return np.outer(a, b)
    d = a[:, None] - b[None, :]
    if p["kernel"] == "laplace":
        return np.exp(-p["gamma"] * np.abs(d))
    return np.exp(-p["gamma"] * d * d)


def d2_fit(p, level=0):
    t, y = d2_data(p)
    q = _d2_kernel(t, t, p) * np.outer(y, y)
    alpha = np.zeros(t.size)
    for _ in range(p["iters"]):
        grad = 1.0 - q @ alpha
        alpha = np.clip(alpha + p["eta"] * grad, 0.0, p["C"])
    if p["alpha_clip_frac"] > 0.0:
        alpha = np.minimum(alpha, p["alpha_clip_frac"] * p["C"])
    if p["sv_drop_n"]:
        drop = np.argsort(alpha)[-p["sv_drop_n"]:]
        alpha = alpha.copy()
        alpha[drop] = 0.0
    return t, y, alpha


def d2_evaluate_fitted(x, p, fit):
    t, y, alpha = fit
    x = np.asarray(x, dtype=np.float64)
    f = _d2_kernel(x, t, p) @ (alpha * y) + p["bias_drift"]
    band = p["sign_flip_band"]
    if band > 0.0:
        f = np.where(np.abs(f) < band, -f, f)
    return f


# ---------------------------------------------------------------------------
# D3: L2-regularised logistic regression, Newton-fitted, probability output.

D3_DOMAIN = (-1.5, 1.5)

_D3_POS = np.array([0.1, 0.2, 0.35, 0.5, 0.7, 0.9, 1.1, 1.25, 1.4, 1.5])

D3_REFERENCE = {
    "l2": 0.05,
    "iters": 8,
    "solver": "newton",     # newton | gd
    "lr": 0.5,
    "l2_spike_every": 0,    # SI-flavoured analogue of the big-reg exemplar
    "l2_spike_value": 4.0,
    "intercept_drift": 0.0,  # CE
    "label_flip_idx": -1,    # CE
    "feature_scale": 1.0,    # CE
    "logit_clamp": 0.0,      # SI: |z| clipped to this bound
    "prob_floor": 0.0,       # SI: probabilities clipped to [f, 1-f]
    "sigmoid_mode": "exact",  # exact | piecewise
    "pos_weight": 1.0,       # OS: positive-class likelihood weight
    "data_stride": 1,        # SI
}


def d3_data(p):
    t = np.concatenate([_D3_POS, -_D3_POS]) * p["feature_scale"]
    y = np.concatenate([np.ones_like(_D3_POS), np.zeros_like(_D3_POS)])
    if 0 <= p["label_flip_idx"] < t.size:
        y = y.copy()
        y[p["label_flip_idx"]] = 1.0 - y[p["label_flip_idx"]]
    return t[:: p["data_stride"]], y[:: p["data_stride"]]


def _d3_sigmoid(z, p):
    if p["sigmoid_mode"] == "piecewise":
        return np.clip(0.5 + 0.25 * z, 0.0, 1.0)
    return 1.0 / (1.0 + np.exp(-z))


def d3_fit(p, level=0):
    t, y = d3_data(p)
    w, b = 0.0, 0.0
    x1 = np.stack([t, np.ones_like(t)], axis=1)
    for it in range(p["iters"]):
        reg = p["l2"]
        if p["l2_spike_every"] and (it + 1) % p["l2_spike_every"] == 0:
            reg = p["l2_spike_value"]
        z = w * t + b
        mu = _d3_sigmoid(z, p)
        cw = np.where(y > 0.5, p["pos_weight"], 1.0)
        grad = x1.T @ (cw * (mu - y)) + reg * np.array([w, b])
        if p["solver"] == "gd":
            w, b = np.array([w, b]) - p["lr"] * grad
        else:
            s = np.clip(cw * mu * (1.0 - mu), 1e-6, None)
            hess = (x1 * s[:, None]).T @ x1 + reg * np.eye(2)
            w, b = np.array([w, b]) - np.linalg.solve(hess, grad)
    return float(w), float(b + p["intercept_drift"])


def d3_evaluate_fitted(x, p, fit):
    w, b = fit
    x = np.asarray(x, dtype=np.float64)
    z = w * x + b
    if p["logit_clamp"] > 0.0:
        z = np.clip(z, -p["logit_clamp"], p["logit_clamp"])
    prob = _d3_sigmoid(z, p)
    if p["prob_floor"] > 0.0:
        prob = np.clip(prob, p["prob_floor"], 1.0 - p["prob_floor"])
    return prob
