"""Surrogate-class kernels: GP regression, polynomial chaos, NN surrogate.

Each surrogate models a fixed analytic target; fitting artifacts are cached
by the registry layer so repeated evaluation is a cheap prediction.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _nets

# ---------------------------------------------------------------------------
# C1: Gaussian-process regression of an odd target on a symmetric grid.

C1_DOMAIN = (-1.0, 1.0)

C1_REFERENCE = {
    "n_train": 12,
    "length_scale": 0.5,
    "sigma_f": 1.0,
    "noise": 1e-4,
    "kernel": "rbf",        # rbf | matern12 | quad | rbf_nosquare
    "omit_jitter": False,    # CE: drop the positive-definite diagonal term
    "mean_drift": 0.0,       # CE: constant added to every prediction
    "y_drift": 0.0,          # CE: asymmetric corruption of the training data
    "solver": "solve",       # solve | lstsq32 | normal_eq
    "alpha_trunc": 0,        # SI: zero out this many smallest-|alpha| weights
}


def c1_target(t):
    t = np.asarray(t, dtype=np.float64)
    return np.sin(3.0 * t) * (1.0 - t * t)


def _c1_kernel(a, b, p):
    d = a[:, None] - b[None, :]
    ls = p["length_scale"]
    if p["kernel"] == "matern12":
        return p["sigma_f"] ** 2 * np.exp(-np.abs(d) / ls)
    if p["kernel"] == "quad":
        return p["sigma_f"] ** 2 / (1.0 + (d / ls) ** 2)
    if p["kernel"] == "rbf_nosquare":
        return p["sigma_f"] ** 2 * np.exp(-0.5 * np.abs(d) / ls)
    return p["sigma_f"] ** 2 * np.exp(-0.5 * (d / ls) ** 2)


def c1_fit(p, level=0):
    n = p["n_train"] * 2 ** level
    t = np.linspace(-1.0, 1.0, n)
    y = c1_target(t) + p["y_drift"] * (1.0 + t)
    k = _c1_kernel(t, t, p)
    if not p["omit_jitter"]:
        k = k + p["noise"] * np.eye(n)
    if p["solver"] == "lstsq32":
        alpha = np.linalg.lstsq(k.astype(np.float32), y.astype(np.float32),
                                rcond=None)[0].astype(np.float64)
    elif p["solver"] == "normal_eq":
        alpha = np.linalg.solve(k.T @ k, k.T @ y)
    else:
        alpha = np.linalg.solve(k, y)
    if p["alpha_trunc"]:
        drop = np.argsort(np.abs(alpha))[: p["alpha_trunc"]]
        alpha = alpha.copy()
        alpha[drop] = 0.0
    return t, alpha


def c1_evaluate_fitted(x, p, fit):
    t, alpha = fit
    x = np.asarray(x, dtype=np.float64)
    return _c1_kernel(x, t, p) @ alpha + p["mean_drift"]


# ---------------------------------------------------------------------------
# C2: polynomial-chaos (Legendre) expansion of an even target with an |t|^3
# component, so the coefficient tail decays at a stable algebraic rate.

C2_DOMAIN = (-1.0, 1.0)

C2_REFERENCE = {
    "degree": 6,
    "n_quad": 64,
    "sort_inversion": -1,   # OS: swap coefficients k and k+1
    "retain_low": False,     # SI: top coefficient replaced by a low one
    "eval_basis": "legendre",  # legendre | chebyshev (mismatched evaluation)
    "odd_drift": 0.0,        # CE: perturb the (analytically zero) c1
    "c0_scale": 1.0,         # CE
    "quad_rule": "gauss",    # gauss | uniform
    "coef_clamp": 0.0,       # SI: |c_j| clipped at this value
    "zero_small": 0.0,       # SI: coefficients below this are zeroed
}


def c2_target(t):
    t = np.asarray(t, dtype=np.float64)
    return np.exp(0.5 * t * t) + 0.4 * np.abs(t) ** 3


@lru_cache(maxsize=32)
def _c2_coeffs(degree, n_quad, quad_rule):
    if quad_rule == "uniform":
        t = np.linspace(-1.0, 1.0, n_quad)
        w = np.full(n_quad, 2.0 / (n_quad - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
    else:
        t, w = np.polynomial.legendre.leggauss(n_quad)
    g = c2_target(t)
    coeffs = np.empty(degree + 1)
    for j in range(degree + 1):
        pj = np.polynomial.legendre.Legendre.basis(j)(t)
        coeffs[j] = (2 * j + 1) / 2.0 * np.sum(w * g * pj)
    return coeffs


def c2_fit(p, level=0):
    degree = p["degree"] * 2 ** level
    c = _c2_coeffs(degree, p["n_quad"], p["quad_rule"]).copy()
    c[0] *= p["c0_scale"]
    if len(c) > 1:
        c[1] += p["odd_drift"]
    k = p["sort_inversion"]
    if 0 <= k < len(c) - 1:
        c[k], c[k + 1] = c[k + 1], c[k]
    if p["retain_low"] and len(c) > 2:
        c[-1] = c[1]
    if p["coef_clamp"] > 0.0:
        c = np.clip(c, -p["coef_clamp"], p["coef_clamp"])
    if p["zero_small"] > 0.0:
        c[np.abs(c) < p["zero_small"]] = 0.0
    return c


def c2_evaluate_fitted(x, p, coeffs):
    x = np.asarray(x, dtype=np.float64)
    if p["eval_basis"] == "chebyshev":
        return np.polynomial.chebyshev.chebval(x, coeffs)
    return np.polynomial.legendre.legval(x, coeffs)


# ---------------------------------------------------------------------------
# C3: one-hidden-layer NN surrogate of sin(2.2 t), trained by full-batch
# gradient descent; the trajectory is the prediction at x across training.

C3_DOMAIN = (-1.0, 1.0)

C3_REFERENCE = {
    "n_train": 24,
    "epochs": 240,
    "lr": 0.25,
    "hidden": 8,
    "activation": "tanh",
    "init_scale": 1.2,
    "init_tag": "c3-init",
    "phase_drift": 0.0,     # TF: training target g(t + drift*epoch)
    "mask_period": 0,       # TF: alternate-epoch hidden-unit mask
    "y_noise_amp": 0.0,     # CE: target corruption amp*cos(5t)
    "l2": 0.0,
    "l2_spike_every": 0,    # SI
    "l2_spike_value": 0.5,
    "grad_omit": "none",    # CE: out_bias | hid_bias
    "optimizer": "gd",      # gd | signgd
    "loss": "mse",          # mse | mae
    "lr_decay": 1.0,        # OS: per-epoch learning-rate decay
    "data_stride": 1,       # SI: train on a subsample
    "dead_unit": -1,        # SI
}


def c3_target(t):
    return np.sin(2.2 * np.asarray(t, dtype=np.float64))


def _c3_yfn(p):
    def y_fn(t, epoch):
        y = c3_target(t + p["phase_drift"] * epoch)
        if p["y_noise_amp"]:
            y = y + p["y_noise_amp"] * np.cos(5.0 * t)
        return y
    return y_fn


def c3_train_points(p):
    return np.linspace(-1.0, 1.0, p["n_train"])[:: p["data_stride"]]


def c3_fit(p, seed, level=0, snapshot_epochs=()):
    t = c3_train_points(p)
    cfg = {**p, "epochs": p["epochs"] * 2 ** level}
    return _nets.train(t, _c3_yfn(p), cfg, seed, snapshot_epochs)


def c3_evaluate_fitted(x, p, weights):
    return _nets.predict(weights, x, p["activation"], p["dead_unit"])
