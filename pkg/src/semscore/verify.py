"""Per-pattern verdict functions for metamorphic relations.

The four verification methods (tolerance equality, Wilcoxon signed-rank,
convergence-order estimation, dynamic time warping) are self-contained so a
verdict never depends on an external statistics stack.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DegenerateSample,
    EmptySequence,
    IrregularRefinement,
    NonPositiveError,
    UnknownMetaPattern,
)

PASS = "pass"
FAIL = "fail"


@dataclass(frozen=True)
class AvpVerdict:
    verdict: str
    statistic: Optional[float] = None
    p_value: Optional[float] = None
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == PASS


def check_tolerance_equality(lhs: float, rhs: float, eps: float) -> AvpVerdict:
    """Pass iff |lhs - rhs| <= eps."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    gap = abs(lhs - rhs)
    ok = gap <= eps
    return AvpVerdict(PASS if ok else FAIL, statistic=gap,
                      detail=f"|lhs-rhs|={gap:.3g} eps={eps:.3g}")


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank

def _signed_ranks(diffs):
    d = np.asarray(diffs, dtype=np.float64)
    d = d[d != 0.0]
    if d.size == 0:
        return d, np.array([])
    order = np.argsort(np.abs(d), kind="stable")
    sorted_abs = np.abs(d)[order]
    ranks = np.empty(d.size)
    i = 0
    while i < d.size:
        j = i
        while j + 1 < d.size and sorted_abs[j + 1] == sorted_abs[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return d, ranks


def _exact_wplus_tail(ranks, w_obs, upper):
    """P(W+ >= w_obs) or P(W+ <= w_obs) by dynamic programming.

    Midranks are half-integers, so everything is doubled to stay integral.
    """
    doubled = np.round(2.0 * ranks).astype(int)
    total = int(doubled.sum())
    counts = np.zeros(total + 1, dtype=float)
    counts[0] = 1.0
    for r in doubled:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[:counts.size - r]
        counts = counts + shifted
    counts /= 2.0 ** len(doubled)
    w2 = int(round(2.0 * w_obs))
    if upper:
        return float(counts[w2:].sum())
    return float(counts[:w2 + 1].sum())


def wilcoxon_signed_rank(diffs, alpha: float = 0.05,
                         alternative: str = "greater") -> AvpVerdict:
    """Signed-rank test; pass iff p >= alpha (no violation detected).

    Zero differences are discarded, ties get midranks. Exact enumeration up
    to n = 25, normal approximation with continuity correction above.
    ``alternative='greater'`` asks whether diffs are systematically > 0.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0, 1)")
    if len(diffs) == 0:
        raise DegenerateSample("empty difference sample")
    d, ranks = _signed_ranks(diffs)
    if d.size == 0:
        return AvpVerdict(PASS, statistic=0.0, p_value=1.0,
                          detail="degenerate: all differences zero")
    w_plus = float(ranks[d > 0].sum())
    n = d.size
    if n <= 25:
        if alternative == "greater":
            p = _exact_wplus_tail(ranks, w_plus, upper=True)
        elif alternative == "less":
            p = _exact_wplus_tail(ranks, w_plus, upper=False)
        else:
            p = 2.0 * min(_exact_wplus_tail(ranks, w_plus, upper=True),
                          _exact_wplus_tail(ranks, w_plus, upper=False))
            p = min(1.0, p)
    else:
        mean = n * (n + 1) / 4.0
        tie_counts = np.unique(np.abs(d), return_counts=True)[1]
        var = (n * (n + 1) * (2 * n + 1) / 24.0
               - float(((tie_counts ** 3 - tie_counts) / 48.0).sum()))
        sd = np.sqrt(max(var, 1e-12))
        from scipy.stats import norm
        if alternative == "greater":
            p = float(norm.sf((w_plus - mean - 0.5) / sd))
        elif alternative == "less":
            p = float(norm.cdf((w_plus - mean + 0.5) / sd))
        else:
            z = (w_plus - mean - np.sign(w_plus - mean) * 0.5) / sd
            p = min(1.0, 2.0 * float(norm.sf(abs(z))))
    return AvpVerdict(PASS if p >= alpha else FAIL,
                      statistic=w_plus, p_value=p,
                      detail=f"n={n} W+={w_plus:.1f}")


# ---------------------------------------------------------------------------
# Convergence order

def convergence_order(errors):
    """Observed order and last residual ratio from an (h, e) ladder.

    Requires at least three entries with h shrinking by a constant factor
    and strictly positive errors.
    """
    pts = list(errors)
    if len(pts) < 3:
        raise IrregularRefinement("need at least three (h, e) entries")
    hs = np.array([p[0] for p in pts], dtype=np.float64)
    es = np.array([p[1] for p in pts], dtype=np.float64)
    if np.any(es <= 0.0):
        raise NonPositiveError("errors must be strictly positive")
    ratios = hs[:-1] / hs[1:]
    if np.any(ratios <= 1.0) or not np.allclose(ratios, ratios[0], rtol=1e-6):
        raise IrregularRefinement("h must decrease by a constant factor")
    orders = np.log(es[:-1] / es[1:]) / np.log(ratios)
    return float(orders.mean()), float(es[-1] / es[-2])


# ---------------------------------------------------------------------------
# Dynamic time warping

def dtw_distance(a, b) -> float:
    """Classic DP time-warping distance with |.| local cost, no band."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        raise EmptySequence("dtw needs two nonempty sequences")
    n, m = a.size, b.size
    prev = np.full(m + 1, np.inf)
    prev[0] = 0.0
    for i in range(1, n + 1):
        cost = np.abs(a[i - 1] - b)
        cur = np.full(m + 1, np.inf)
        for j in range(1, m + 1):
            cur[j] = cost[j - 1] + min(prev[j], cur[j - 1], prev[j - 1])
        prev = cur
    return float(prev[m])


# ---------------------------------------------------------------------------
# Dispatch

def avp_verify(program, mr, seed: int = 0, allow_equality: bool = False) -> AvpVerdict:
    """Run the pattern-appropriate verification method for one relation."""
    if mr.put != program.put:
        raise ValueError(f"relation {mr.mr_id} is for {mr.put}, got {program.put}")
    mp = mr.mp.value if hasattr(mr.mp, "value") else str(mr.mp)
    if mp == "MP_eq" and not allow_equality:
        raise UnknownMetaPattern("equality pattern outside degenerate mode")
    try:
        if mp in ("MP1", "MP_eq"):
            res = np.asarray(mr.residuals(program, seed), dtype=np.float64)
            if not np.all(np.isfinite(res)):
                return AvpVerdict(FAIL, detail="non-finite")
            worst = float(np.max(np.abs(res))) if res.size else 0.0
            ok = worst <= mr.tolerance
            return AvpVerdict(PASS if ok else FAIL, statistic=worst,
                              detail=f"max|res|={worst:.3g} eps={mr.tolerance:.3g}")
        if mp in ("MP2", "MP5"):
            diffs = np.asarray(mr.paired_diffs(program, seed), dtype=np.float64)
            if not np.all(np.isfinite(diffs)):
                return AvpVerdict(FAIL, detail="non-finite")
            return wilcoxon_signed_rank(diffs, alpha=mr.tolerance,
                                        alternative="greater")
        if mp == "MP3":
            hs, errs, expected = mr.error_ladder(program, seed)
            errs = np.asarray(errs, dtype=np.float64)
            if not np.all(np.isfinite(errs)):
                return AvpVerdict(FAIL, detail="non-finite")
            try:
                order, ratio = convergence_order(list(zip(hs, errs)))
            except NonPositiveError:
                return AvpVerdict(FAIL, detail="vanishing error ladder")
            ok = abs(order - expected) <= mr.tolerance and ratio < 1.0
            return AvpVerdict(PASS if ok else FAIL, statistic=order,
                              detail=f"order={order:.2f} expected={expected:.2f} "
                                     f"ratio={ratio:.3f}")
        if mp == "MP4":
            a, b, threshold = mr.dtw_pair(program, seed)
            a = np.asarray(a, dtype=np.float64)
            b = np.asarray(b, dtype=np.float64)
            if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
                return AvpVerdict(FAIL, detail="non-finite")
            dist = dtw_distance(a, b)
            ok = dist <= threshold
            return AvpVerdict(PASS if ok else FAIL, statistic=dist,
                              detail=f"dtw={dist:.3g} eps={threshold:.3g}")
    except (FloatingPointError, np.linalg.LinAlgError):
        return AvpVerdict(FAIL, detail="non-finite")
    raise UnknownMetaPattern(f"no verification method for {mp}")
