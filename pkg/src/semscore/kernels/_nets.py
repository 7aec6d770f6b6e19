"""Tiny full-batch MLP trainer shared by the surrogate and ML kernels.

One hidden layer, scalar in/out, deterministic given the init seed. Training
is cheap enough to run per (variant, seed) pair; callers cache results.
"""

from __future__ import annotations

import numpy as np

from ..rng import stream


def init_weights(hidden, init_scale, seed, tag):
    rng = stream(tag, seed)
    w1 = rng.normal(0.0, init_scale, size=hidden)
    b1 = rng.normal(0.0, 0.1, size=hidden)
    w2 = rng.normal(0.0, init_scale / np.sqrt(hidden), size=hidden)
    b2 = 0.0
    return [w1, b1, w2, b2]


def _act(z, kind):
    if kind == "relu":
        return np.maximum(z, 0.0)
    return np.tanh(z)


def _act_grad(z, kind):
    if kind == "relu":
        return (z > 0.0).astype(float)
    t = np.tanh(z)
    return 1.0 - t * t


def predict(weights, x, activation="tanh", dead_unit=-1):
    w1, b1, w2, b2 = weights
    x = np.asarray(x, dtype=np.float64)
    z = np.outer(x, w1) + b1
    h = _act(z, activation)
    if dead_unit >= 0:
        h[:, dead_unit] = 0.0
    return h @ w2 + b2


def train(t, y_fn, cfg, seed, snapshot_epochs=()):
    """Gradient-descent fit of y_fn(t, epoch) over the sample points t.

    y_fn receives the epoch so training-time target distortions (phase
    drift) are expressible. Returns (weights, snapshots) where snapshots
    maps epoch -> weight copies for trajectory reconstruction.
    """
    hidden = cfg["hidden"]
    act = cfg["activation"]
    w1, b1, w2, b2 = init_weights(hidden, cfg["init_scale"], seed, cfg["init_tag"])
    n = t.size
    snapshots = {}
    want = set(int(e) for e in snapshot_epochs)
    if 0 in want:
        snapshots[0] = [w1.copy(), b1.copy(), w2.copy(), b2]
    for epoch in range(1, cfg["epochs"] + 1):
        y = y_fn(t, epoch - 1)
        z = np.outer(t, w1) + b1
        h = _act(z, act)
        if cfg["mask_period"] and ((epoch - 1) // cfg["mask_period"]) % 2 == 1:
            h = h.copy()
            h[:, ::2] = 0.0
        if cfg["dead_unit"] >= 0:
            h = h.copy()
            h[:, cfg["dead_unit"]] = 0.0
        pred = h @ w2 + b2
        err = pred - y
        if cfg["loss"] == "mae":
            dout = np.sign(err) / n
        else:
            dout = 2.0 * err / n
        gw2 = h.T @ dout
        gb2 = float(np.sum(dout))
        dh = np.outer(dout, w2) * _act_grad(z, act)
        gw1 = t @ dh
        gb1 = dh.sum(axis=0)
        reg = cfg["l2"]
        if cfg["l2_spike_every"] and epoch % cfg["l2_spike_every"] == 0:
            reg = cfg["l2_spike_value"]
        if reg:
            gw1 = gw1 + reg * w1
            gw2 = gw2 + reg * w2
        if cfg["grad_omit"] == "out_bias":
            gb2 = 0.0
        elif cfg["grad_omit"] == "hid_bias":
            gb1 = np.zeros_like(gb1)
        lr = cfg["lr"] * cfg.get("lr_decay", 1.0) ** epoch
        if cfg["optimizer"] == "signgd":
            w1 = w1 - lr * 0.05 * np.sign(gw1)
            b1 = b1 - lr * 0.05 * np.sign(gb1)
            w2 = w2 - lr * 0.05 * np.sign(gw2)
            b2 = b2 - lr * 0.05 * np.sign(gb2)
        else:
            w1 = w1 - lr * gw1
            b1 = b1 - lr * gb1
            w2 = w2 - lr * gw2
            b2 = b2 - lr * gb2
        if epoch in want:
            snapshots[epoch] = [w1.copy(), b1.copy(), w2.copy(), b2]
    return [w1, b1, w2, b2], snapshots
