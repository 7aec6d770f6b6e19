"""Probabilistic-class kernels: conjugate posterior, MCMC chain, MC integral.

B1 is deterministic (fixed quadrature); B2 and B3 draw every random number
from a Philox stream keyed by the caller-supplied seed, so identical
(x, seed) pairs reproduce bit-identical outputs.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..rng import stream

# ---------------------------------------------------------------------------
# B1: Beta-Binomial posterior mean, computed by Gauss-Legendre quadrature of
# the unnormalised posterior so that normalisation is a mutable step.
# Input x scales the prior strength: alpha = prior_a*x, beta = prior_b*x.

B1_DOMAIN = (0.25, 8.0)

B1_REFERENCE = {
    "prior_a": 2.0,
    "prior_b": 3.0,
    "trials": 40,
    "successes": 13,
    "nodes": 160,
    "normalize": True,       # CE: skip the evidence denominator
    "swap_prior": False,     # OS: alpha/beta swapped
    "rule": "gauss",         # gauss | trapezoid | midpoint
    "den_rule": "",          # OS: evidence integral on a different rule
    "theta_clip": 0.0,       # SI: integrate over [c, 1-c] only
    "dens_floor": 0.0,       # SI: additive leak under the posterior density
    "exponent_drift": 0.0,   # CE: perturb the posterior alpha exponent
    "mean_power": 1.0,       # SI: E[theta^p] instead of E[theta]
    "successes_drift": 0.0,  # CE: k replaced by k + drift
}


@lru_cache(maxsize=16)
def _quad_rule(rule, nodes, clip):
    lo, hi = clip, 1.0 - clip
    if rule == "trapezoid":
        t = np.linspace(lo, hi, nodes)
        w = np.full(nodes, (hi - lo) / (nodes - 1))
        w[0] *= 0.5
        w[-1] *= 0.5
        return t, w
    if rule == "midpoint":
        edges = np.linspace(lo, hi, nodes + 1)
        t = 0.5 * (edges[:-1] + edges[1:])
        return t, np.full(nodes, (hi - lo) / nodes)
    t, w = np.polynomial.legendre.leggauss(nodes)
    return 0.5 * (hi - lo) * t + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def b1_evaluate(x, seed, p):
    x = np.asarray(x, dtype=np.float64)
    a = p["prior_a"] * x
    b = p["prior_b"] * x
    if p["swap_prior"]:
        a, b = b, a
    k = p["successes"] + p["successes_drift"]
    n = p["trials"]
    t, w = _quad_rule(p["rule"], p["nodes"], p["theta_clip"])
    # posterior density ~ theta^(a+k-1) (1-theta)^(b+n-k-1), in log space
    e1 = (a + k - 1.0 + p["exponent_drift"])[:, None]
    e2 = (b + (n - k) - 1.0)[:, None]
    logt = np.log(t)[None, :]
    log1t = np.log1p(-t)[None, :]
    logw = e1 * logt + e2 * log1t
    logw -= logw.max(axis=1, keepdims=True)
    dens = np.exp(logw)
    if p["dens_floor"]:
        dens = dens + p["dens_floor"]
    num = dens @ (w * t ** p["mean_power"])
    if not p["normalize"]:
        return num
    if p["den_rule"] and p["den_rule"] != p["rule"]:
        t2, w2 = _quad_rule(p["den_rule"], p["nodes"], p["theta_clip"])
        logw2 = e1 * np.log(t2)[None, :] + e2 * np.log1p(-t2)[None, :]
        logw2 -= logw.max(axis=1, keepdims=True)
        dens2 = np.exp(logw2)
        if p["dens_floor"]:
            dens2 = dens2 + p["dens_floor"]
        return num / (dens2 @ w2)
    return num / (dens @ w)


def b1_analytic_mean(x, p=None):
    """Closed-form posterior mean, used by relation fixtures and tests."""
    p = B1_REFERENCE if p is None else p
    x = np.asarray(x, dtype=np.float64)
    a = p["prior_a"] * x
    b = p["prior_b"] * x
    return (a + p["successes"]) / (a + b + p["trials"])


# ---------------------------------------------------------------------------
# B2: random-walk Metropolis-Hastings targeting Gamma(shape, scale(x)) with
# scale(x) = scale_base + scale_slope * x. Scalar output is the kept-chain
# mean; the trajectory is the thinned chain itself.

B2_DOMAIN = (0.0, 4.0)

B2_REFERENCE = {
    "shape": 2.0,
    "scale_base": 0.6,
    "scale_slope": 0.25,
    "prop_width": 0.9,
    "n_burn": 150,
    "n_keep": 1600,
    "accept_cap": 1.0,      # OS: min(1, r) -> min(cap, r)
    "ratio_bias": 0.0,      # CE: acceptance ratio inflated by (1 + bias)
    "drift_per_step": 0.0,  # CE: deterministic leak added to the state
    "indep_every": 0,       # TF: every m-th proposal is an absolute jump
    "indep_width": 3.0,
    "prop_dist": "normal",  # normal | uniform | exp_shifted
    "init_offset": 0.0,
}


def b2_scale(x, p):
    return p["scale_base"] + p["scale_slope"] * np.asarray(x, dtype=np.float64)


def _b2_log_density(theta, scale, p):
    with np.errstate(divide="ignore", invalid="ignore"):
        logd = (p["shape"] - 1.0) * np.log(theta) - theta / scale
    return np.where(theta > 0.0, logd, -np.inf)


def _b2_chain(x, seed, p, keep_full=False):
    x = np.asarray(x, dtype=np.float64)
    scale = b2_scale(x, p)
    n_total = p["n_burn"] + p["n_keep"]
    rng = stream("b2-chain", seed)
    if p["prop_dist"] == "uniform":
        incr = rng.uniform(-1.7, 1.7, size=(n_total, x.size))
    elif p["prop_dist"] == "exp_shifted":
        # asymmetric proposal used without a Hastings correction
        incr = rng.exponential(1.0, size=(n_total, x.size)) - 0.8
    else:
        incr = rng.normal(0.0, 1.0, size=(n_total, x.size))
    unif = rng.uniform(0.0, 1.0, size=(n_total, x.size))
    jumps = rng.normal(0.0, 1.0, size=(n_total, x.size))

    theta = p["shape"] * scale + p["init_offset"]
    logd = _b2_log_density(theta, scale, p)
    kept_sum = np.zeros_like(theta)
    full = np.empty((n_total + 1, x.size)) if keep_full else None
    if keep_full:
        full[0] = theta
    for t in range(n_total):
        if p["indep_every"] and (t + 1) % p["indep_every"] == 0:
            prop = np.abs(jumps[t]) * p["indep_width"]
        else:
            prop = theta + incr[t] * p["prop_width"]
        logd_prop = _b2_log_density(prop, scale, p)
        with np.errstate(over="ignore"):
            ratio = np.exp(logd_prop - logd) * (1.0 + p["ratio_bias"])
        accept = unif[t] < np.minimum(p["accept_cap"], ratio)
        theta = np.where(accept, prop, theta)
        logd = np.where(accept, logd_prop, logd)
        if p["drift_per_step"] != 0.0:
            theta = theta + p["drift_per_step"]
            logd = _b2_log_density(theta, scale, p)
        if keep_full:
            full[t + 1] = theta
        if t >= p["n_burn"]:
            kept_sum += theta
    return kept_sum / p["n_keep"], full


def b2_evaluate(x, seed, p):
    mean, _ = _b2_chain(x, seed, p)
    return mean


def b2_trajectory(x, seed, steps, p):
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    _, full = _b2_chain(x, seed, p, keep_full=True)
    n_total = full.shape[0] - 1
    checkpoints = np.unique(np.round(np.linspace(0, n_total, steps)).astype(int))
    if len(checkpoints) != steps:
        raise ValueError("steps exceeds the chain length")
    return full[checkpoints, 0]


def b2_refined(p, level):
    return {**p, "n_keep": p["n_keep"] * 2 ** level}


# ---------------------------------------------------------------------------
# B3: importance-sampled Gaussian integral E_t~N(0,1)[exp(-x t^2)], whose
# exact value 1/sqrt(1+2x) anchors the conservation and convergence checks.

B3_DOMAIN = (0.1, 2.0)

B3_REFERENCE = {
    "n_samples": 3000,
    "proposal_sigma": 1.25,
    "cap_samples": 0,       # HP: refinement stops helping beyond this count
    "weight_mode": "exact",  # exact | unit | pow090
    "clamp_w": 0.0,          # SI: importance weights clipped at this value
    "sample_stride": 1,      # SI: keep every k-th sample, reuse to fill
    "proposal_dist": "normal",  # normal | uniform | student_nocorr
    "proposal_center": 0.0,  # OS: proposal shifted, weights left uncorrected
    "agg": "mean",           # OS: mean | median | trimmed estimator
    "integrand_drift": 0.0,  # CE: exp(-(x+drift) t^2)
}


def b3_exact(x):
    x = np.asarray(x, dtype=np.float64)
    return 1.0 / np.sqrt(1.0 + 2.0 * x)


def b3_evaluate(x, seed, p):
    x = np.asarray(x, dtype=np.float64)
    n = p["n_samples"]
    if p["cap_samples"]:
        n = min(n, p["cap_samples"])
    rng = stream("b3-samples", seed)
    sig = p["proposal_sigma"]
    if p["proposal_dist"] == "uniform":
        half = 4.0 * sig
        t = rng.uniform(-half, half, size=n)
        logq = np.full(n, -np.log(2.0 * half))
    elif p["proposal_dist"] == "student_nocorr":
        t = rng.standard_t(3, size=n) * sig
        # weights deliberately keep the normal-proposal formula
        logq = -0.5 * (t / sig) ** 2 - np.log(sig) - 0.5 * np.log(2.0 * np.pi)
    else:
        t = rng.normal(p["proposal_center"], sig, size=n)
        logq = -0.5 * (t / sig) ** 2 - np.log(sig) - 0.5 * np.log(2.0 * np.pi)
    logphi = -0.5 * t ** 2 - 0.5 * np.log(2.0 * np.pi)
    w = np.exp(logphi - logq)
    if p["weight_mode"] == "unit":
        w = np.ones_like(w)
    elif p["weight_mode"] == "pow090":
        w = w ** 0.90
    if p["clamp_w"] > 0.0:
        w = np.minimum(w, p["clamp_w"])
    if p["sample_stride"] > 1:
        t = np.repeat(t[:: p["sample_stride"]], p["sample_stride"])[:n]
        w = np.repeat(w[:: p["sample_stride"]], p["sample_stride"])[:n]
    vals = np.exp(-np.outer(x + p["integrand_drift"], t ** 2))
    if p["agg"] == "median":
        return np.median(vals * w, axis=1)
    if p["agg"] == "trimmed":
        prods = np.sort(vals * w, axis=1)
        k = max(1, n // 10)
        return prods[:, k:-k].mean(axis=1)
    return vals @ w / n


def b3_refined(p, level):
    return {**p, "n_samples": p["n_samples"] * 4 ** level}
