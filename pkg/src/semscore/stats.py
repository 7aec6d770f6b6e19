"""Effect sizes, rank tests, multiplicity control, power, and verdicts.

Pair-counting statistics are implemented directly (with brute-force
oracles in the test suite); only distribution tail functions come from
scipy.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations
from typing import Optional, Tuple

import numpy as np
from scipy.stats import chi2 as _chi2

from .errors import (
    DegenerateMatrix,
    EmptySample,
    IncompleteInput,
    LengthMismatch,
    UnreachableTarget,
    ZeroMean,
)
from .rng import stream

ROMANO_SMALL = 0.147
ROMANO_MEDIUM = 0.330
ROMANO_LARGE = 0.474


# ---------------------------------------------------------------------------
# effect size

def cliffs_delta(a, b) -> float:
    """(#greater - #less) / (n1*n2) over all cross pairs."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be nonempty")
    diff = a[:, None] - b[None, :]
    return float((np.sum(diff > 0) - np.sum(diff < 0)) / (a.size * b.size))


def rank_invariance_check(a, b, monotone_map) -> bool:
    """Delta is untouched by any strictly increasing transform."""
    before = cliffs_delta(a, b)
    after = cliffs_delta([monotone_map(v) for v in np.asarray(a, dtype=float)],
                         [monotone_map(v) for v in np.asarray(b, dtype=float)])
    return before == after


def bootstrap_ci(a, b, iterations: int = 1000, seed: int = 0,
                 levels=(2.5, 97.5)) -> Tuple[float, float]:
    """Percentile bootstrap interval for the delta estimate."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptySample("both samples must be nonempty")
    if iterations < 100:
        raise ValueError("iterations must be >= 100")
    rng = stream("bootstrap", seed)
    deltas = np.empty(iterations)
    for i in range(iterations):
        ra = a[rng.integers(0, a.size, a.size)]
        rb = b[rng.integers(0, b.size, b.size)]
        deltas[i] = cliffs_delta(ra, rb)
    lo, hi = np.percentile(deltas, levels)
    return float(lo), float(hi)


def romano_classify(delta: float) -> str:
    if abs(delta) > 1.0 + 1e-12:
        raise ValueError("delta must lie in [-1, 1]")
    mag = abs(delta)
    if mag >= ROMANO_LARGE:
        return "large"
    if mag >= ROMANO_MEDIUM:
        return "medium"
    if mag >= ROMANO_SMALL:
        return "small"
    return "negligible"


@dataclass(frozen=True)
class EffectSizeReport:
    delta: float
    ci_low: float
    ci_high: float
    bootstrap_iterations: int
    classification: str


def effect_size_report(a, b, iterations=1000, seed=0) -> EffectSizeReport:
    d = cliffs_delta(a, b)
    lo, hi = bootstrap_ci(a, b, iterations, seed)
    return EffectSizeReport(d, lo, hi, iterations, romano_classify(d))


# ---------------------------------------------------------------------------
# odds and signs

def odds_ratios(aligned, cross):
    """(nonzero-odds ratio with the +0.5 correction, ratio of medians)."""
    aligned = np.asarray(aligned, dtype=np.float64)
    cross = np.asarray(cross, dtype=np.float64)
    if aligned.size == 0 or cross.size == 0:
        raise EmptySample("both slices must be nonempty")
    a_pos = np.sum(aligned > 0)
    c_pos = np.sum(cross > 0)
    nonzero_or = (((a_pos + 0.5) / (aligned.size - a_pos + 0.5))
                  / ((c_pos + 0.5) / (cross.size - c_pos + 0.5)))
    med_a, med_c = float(np.median(aligned)), float(np.median(cross))
    if med_c == 0.0:
        median_ratio = np.inf if med_a > 0 else np.nan
    else:
        median_ratio = med_a / med_c
    return float(nonzero_or), float(median_ratio)


def sign_test(class_deltas) -> Tuple[int, int, float]:
    """Exact one-sided binomial; zeros count against the hypothesis."""
    d = np.asarray(class_deltas, dtype=np.float64)
    if d.size == 0:
        raise EmptySample("need at least one class delta")
    positives = int(np.sum(d > 0))
    total = int(d.size)
    # P(X >= positives) under fair signs
    from math import comb
    p = sum(comb(total, k) for k in range(positives, total + 1)) / 2.0 ** total
    return positives, total, float(p)


def coefficient_of_variation(values) -> float:
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise EmptySample("need values")
    mean = v.mean()
    if mean == 0.0:
        raise ZeroMean("coefficient of variation undefined at zero mean")
    return float(v.std() / abs(mean))


# ---------------------------------------------------------------------------
# rank tests

def _midranks(row):
    order = np.argsort(row, kind="stable")
    ranks = np.empty(len(row))
    i = 0
    sorted_vals = row[order]
    while i < len(row):
        j = i
        while j + 1 < len(row) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def friedman(matrix):
    """Within-row midranks, chi-square statistic, and rank concordance."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[1] < 2:
        raise DegenerateMatrix("need an n x k matrix with k >= 2")
    n, k = m.shape
    if n < 2:
        raise DegenerateMatrix("need at least two rows")
    ranks = np.vstack([_midranks(row) for row in m])
    rank_means = ranks.mean(axis=0)
    chi2 = 12.0 * n / (k * (k + 1)) * float(
        np.sum((rank_means - (k + 1) / 2.0) ** 2))
    p = float(_chi2.sf(chi2, k - 1))
    w = chi2 / (n * (k - 1))
    return float(chi2), p, float(w), rank_means.tolist()


def bonferroni(pvals, m: int):
    if m < 1:
        raise ValueError("m must be >= 1")
    return [min(1.0, float(p) * m) for p in np.atleast_1d(pvals)]


def _perm_pvalue(stat_fn, x, y, observed, n_mc=10000, seed=0):
    n = len(x)
    if n <= 8:
        stats = [stat_fn(x, np.asarray(p)) for p in permutations(y)]
        stats = np.asarray(stats)
        return float(np.mean(np.abs(stats) >= abs(observed) - 1e-12))
    rng = stream("perm", seed)
    hits = 1
    for _ in range(n_mc):
        if abs(stat_fn(x, rng.permutation(y))) >= abs(observed) - 1e-12:
            hits += 1
    return hits / (n_mc + 1)


def _spearman_rho(x, y):
    rx, ry = _midranks(x), _midranks(y)
    sx, sy = rx.std(), ry.std()
    if sx == 0 or sy == 0:
        return 0.0
    return float(((rx - rx.mean()) * (ry - ry.mean())).mean() / (sx * sy))


def _kendall_tau_b(x, y):
    n = len(x)
    conc = disc = tx = ty = 0
    for i in range(n):
        for j in range(i + 1, n):
            dx = x[i] - x[j]
            dy = y[i] - y[j]
            if dx == 0 and dy == 0:
                tx += 1
                ty += 1
            elif dx == 0:
                tx += 1
            elif dy == 0:
                ty += 1
            elif dx * dy > 0:
                conc += 1
            else:
                disc += 1
    n0 = n * (n - 1) / 2.0
    denom = np.sqrt((n0 - tx) * (n0 - ty))
    if denom == 0:
        return 0.0
    return float((conc - disc) / denom)


def spearman_kendall(x, y, seed: int = 0):
    """Midrank rho and tau-b with permutation p-values."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size != y.size:
        raise LengthMismatch("samples must pair up")
    if x.size < 3:
        raise LengthMismatch("need at least three pairs")
    rho = _spearman_rho(x, y)
    tau = _kendall_tau_b(x, y)
    p_rho = _perm_pvalue(_spearman_rho, x, y, rho, seed=seed)
    p_tau = _perm_pvalue(_kendall_tau_b, x, y, tau, seed=seed + 1)
    return rho, tau, p_rho, p_tau


def bh_fdr(pvals, alpha: float = 0.05):
    """Benjamini-Hochberg step-up rejection flags."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    p = np.asarray(pvals, dtype=np.float64)
    m = p.size
    order = np.argsort(p, kind="stable")
    flags = np.zeros(m, dtype=bool)
    threshold_idx = -1
    for rank, idx in enumerate(order, start=1):
        if p[idx] <= alpha * rank / m:
            threshold_idx = rank
    if threshold_idx > 0:
        flags[order[:threshold_idx]] = True
    return flags.tolist()


# ---------------------------------------------------------------------------
# power

@dataclass(frozen=True)
class PowerReport:
    mode: str
    thresholds_and_powers: Tuple[Tuple[float, float], ...]
    n_sim: int
    mixture_weight: Optional[float] = None
    realized_expected_delta: Optional[float] = None
    ci_positive_power: Optional[float] = None


def power_plugin(aligned, cross, thresholds=(0.0, ROMANO_SMALL,
                                             ROMANO_MEDIUM, ROMANO_LARGE),
                 n_sim: int = 5000, seed: int = 42) -> PowerReport:
    """Resampled exceedance rates of the delta estimate."""
    aligned = np.asarray(aligned, dtype=np.float64)
    cross = np.asarray(cross, dtype=np.float64)
    if aligned.size == 0 or cross.size == 0:
        raise EmptySample("both slices must be nonempty")
    if n_sim < 100:
        raise ValueError("n_sim must be >= 100")
    rng = stream("power-plugin", seed)
    deltas = np.empty(n_sim)
    for i in range(n_sim):
        ra = aligned[rng.integers(0, aligned.size, aligned.size)]
        rb = cross[rng.integers(0, cross.size, cross.size)]
        deltas[i] = cliffs_delta(ra, rb)
    rows = tuple((float(t), float(np.mean(deltas > t))) for t in thresholds)
    return PowerReport("plugin", rows, n_sim)


def _mixture_deltas(aligned, cross, w, n_sim, seed, shift=0.001):
    """Delta estimates when aligned draws come from the shifted sample with
    probability w (common random numbers across weights)."""
    rng = stream("power-stip", seed)
    n_a, n_c = aligned.size, cross.size
    idx_a = rng.integers(0, n_a, (n_sim, n_a))
    idx_c = rng.integers(0, n_c, (n_sim, n_c))
    unif = rng.uniform(0.0, 1.0, (n_sim, n_a))
    deltas = np.empty(n_sim)
    for i in range(n_sim):
        ra = aligned[idx_a[i]] + shift * (unif[i] < w)
        rb = cross[idx_c[i]]
        deltas[i] = cliffs_delta(ra, rb)
    return deltas


def power_stipulated(aligned, cross, target_delta: float, n_sim: int = 2000,
                     seed: int = 42, tol: float = 0.005,
                     ci_iterations: int = 400) -> PowerReport:
    """Calibrate the mixture weight until the expected delta hits the
    stipulated truth; report point-estimate and CI-positive power."""
    aligned = np.asarray(aligned, dtype=np.float64)
    cross = np.asarray(cross, dtype=np.float64)
    observed = cliffs_delta(aligned, cross)
    if not observed < target_delta < 1.0:
        raise UnreachableTarget(
            f"target {target_delta} not in (observed {observed:.3f}, 1)")
    lo, hi = 0.0, 1.0
    w = 0.5
    realized = None
    for _ in range(40):
        w = 0.5 * (lo + hi)
        realized = float(np.mean(_mixture_deltas(aligned, cross, w,
                                                 n_sim, seed)))
        if abs(realized - target_delta) <= tol:
            break
        if realized < target_delta:
            lo = w
        else:
            hi = w
    deltas = _mixture_deltas(aligned, cross, w, n_sim, seed)
    point_power = float(np.mean(deltas >= target_delta))

    rng = stream("power-stip-ci", seed)
    n_a, n_c = aligned.size, cross.size
    positives = 0
    for i in range(n_sim):
        ra = aligned[rng.integers(0, n_a, n_a)]
        ra = ra + 0.001 * (rng.uniform(0, 1, n_a) < w)
        rb = cross[rng.integers(0, n_c, n_c)]
        inner = np.empty(ci_iterations)
        for j in range(ci_iterations):
            inner[j] = cliffs_delta(ra[rng.integers(0, n_a, n_a)],
                                    rb[rng.integers(0, n_c, n_c)])
        if np.percentile(inner, 2.5) > 0.0:
            positives += 1
    return PowerReport(
        "stipulated",
        ((float(target_delta), point_power),),
        n_sim,
        mixture_weight=float(w),
        realized_expected_delta=realized,
        ci_positive_power=positives / n_sim,
    )


# ---------------------------------------------------------------------------
# hypothesis verdicts

@dataclass(frozen=True)
class HypothesisVerdicts:
    h1: str
    h2: str
    h3: str
    h4: str
    support: dict


def evaluate_hypotheses(campaign, stats: dict) -> HypothesisVerdicts:
    """Apply the four pre-registered rules to a finished campaign."""
    if campaign is None or not campaign.matrix:
        raise IncompleteInput("campaign results required")
    if any(c.killed_count and c.c1_share is None for c in campaign.matrix):
        raise IncompleteInput("root-cause annotation required")

    # H1: >= 4 operator classes with >= 5 non-equivalent mutants on >= 9
    # programs (judged in the program's primary-pattern cell).
    from .relations import primary_mp
    from .mutants import OperatorClass
    qualifying = 0
    per_operator = {}
    for op in OperatorClass:
        puts_ok = 0
        for put in sorted({c.put for c in campaign.tensor}, key=lambda p: p.value):
            cell = next(c for c in campaign.tensor
                        if c.put == put and c.operator == op
                        and c.mp == primary_mp(put))
            non_equiv = cell.inst_count - cell.equiv_count
            if non_equiv >= 5:
                puts_ok += 1
        per_operator[op.value] = puts_ok
        if puts_ok >= 9:
            qualifying += 1
    h1 = "met" if qualifying >= 4 else "not_met"

    delta = stats["delta"]
    nonzero_or = stats["nonzero_odds_ratio"]
    h2 = "met" if (nonzero_or >= 3.0 and delta >= ROMANO_LARGE) else "not_met"

    positives, total, _ = stats["sign_test"]
    cv = stats.get("cv_delta_sms")
    if positives == total and cv is not None and cv < 0.5:
        h3 = "met"
    elif positives == total - 1:
        h3 = "partial"
    else:
        h3 = "not_met"

    suspect = [c.suspect_share for c in campaign.matrix
               if c.suspect_share is not None]
    mean_suspect = float(np.mean(suspect)) if suspect else None
    h4 = "met" if (mean_suspect is not None and mean_suspect <= 0.20) \
        else "not_met"

    return HypothesisVerdicts(
        h1=h1, h2=h2, h3=h3, h4=h4,
        support={
            "h1_puts_per_operator": per_operator,
            "h1_qualifying_operators": qualifying,
            "delta": delta,
            "nonzero_odds_ratio": nonzero_or,
            "sign_test": {"positives": positives, "total": total},
            "cv_delta_sms": cv,
            "mean_suspect_share": mean_suspect,
        })
