"""Verifier primitives against brute-force oracles."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semscore.errors import (
    DegenerateSample,
    EmptySequence,
    IrregularRefinement,
    NonPositiveError,
)
from semscore.verify import (
    check_tolerance_equality,
    convergence_order,
    dtw_distance,
    wilcoxon_signed_rank,
)


# ---------------------------------------------------------------------------
# oracles

def brute_wilcoxon_p(diffs, alternative):
    """Tail probability of W+ over all 2^n sign assignments (midranks)."""
    d = np.asarray(diffs, dtype=float)
    d = d[d != 0]
    n = d.size
    from scipy.stats import rankdata
    ranks = rankdata(np.abs(d))
    w_obs = ranks[d > 0].sum()
    ws = []
    for signs in itertools.product([0, 1], repeat=n):
        ws.append(sum(r for r, s in zip(ranks, signs) if s))
    ws = np.asarray(ws)
    if alternative == "greater":
        return float(np.mean(ws >= w_obs - 1e-12))
    if alternative == "less":
        return float(np.mean(ws <= w_obs + 1e-12))
    return min(1.0, 2.0 * min(np.mean(ws >= w_obs - 1e-12),
                              np.mean(ws <= w_obs + 1e-12)))


def brute_dtw(a, b):
    """Minimum alignment cost over all monotone warping paths."""
    best = [np.inf]

    def walk(i, j, cost):
        cost = cost + abs(a[i] - b[j])
        if cost >= best[0]:
            return
        if i == len(a) - 1 and j == len(b) - 1:
            best[0] = cost
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            ni, nj = i + di, j + dj
            if ni < len(a) and nj < len(b):
                walk(ni, nj, cost)

    walk(0, 0, 0.0)
    return best[0]


# ---------------------------------------------------------------------------
# Wilcoxon

def test_wilcoxon_all_positive_exact():
    # P(W+ >= 15) with n=5 is the single all-positive assignment: 1/32
    v = wilcoxon_signed_rank([0.5, 1.0, 1.5, 2.0, 2.5], alternative="greater")
    assert v.p_value == pytest.approx(1.0 / 32.0)
    assert v.verdict == "fail"  # a systematic positive shift is a violation


def test_wilcoxon_mixed_two_sided_exact():
    # W- = 6 for {+1..+5, -6}; oracle: 2 * P(W <= 6) = 2 * 14/64
    diffs = [1.0, 2.0, 3.0, 4.0, 5.0, -6.0]
    v = wilcoxon_signed_rank(diffs, alternative="two-sided")
    assert v.p_value == pytest.approx(brute_wilcoxon_p(diffs, "two-sided"))
    assert v.p_value == pytest.approx(2 * 14 / 64)


def test_wilcoxon_all_zero_degenerate_pass():
    v = wilcoxon_signed_rank([0.0, 0.0, 0.0])
    assert v.verdict == "pass"
    assert v.p_value == 1.0
    assert "degenerate" in v.detail


def test_wilcoxon_empty_raises():
    with pytest.raises(DegenerateSample):
        wilcoxon_signed_rank([])


@pytest.mark.parametrize("alternative", ["greater", "less", "two-sided"])
@pytest.mark.parametrize("trial", range(6))
def test_wilcoxon_exact_matches_enumeration(alternative, trial):
    rng = np.random.default_rng(100 + trial)
    n = int(rng.integers(3, 11))
    diffs = np.round(rng.normal(0.3, 1.0, n), 1)
    diffs = diffs[diffs != 0]
    if diffs.size == 0:
        return
    v = wilcoxon_signed_rank(diffs, alternative=alternative)
    assert v.p_value == pytest.approx(brute_wilcoxon_p(diffs, alternative))


def test_wilcoxon_normal_approx_reasonable():
    rng = np.random.default_rng(7)
    diffs = rng.normal(0.0, 1.0, 60)
    v = wilcoxon_signed_rank(diffs, alternative="greater")
    assert 0.0 <= v.p_value <= 1.0
    strong = wilcoxon_signed_rank(np.abs(diffs) + 0.1, alternative="greater")
    assert strong.p_value < 1e-6
    assert strong.verdict == "fail"


# ---------------------------------------------------------------------------
# DTW

def test_dtw_identical_zero():
    assert dtw_distance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0


def test_dtw_small_example():
    assert dtw_distance([1.0, 2.0, 3.0], [1.0, 3.0]) == pytest.approx(
        brute_dtw([1.0, 2.0, 3.0], [1.0, 3.0]))
    assert dtw_distance([1.0, 2.0, 3.0], [1.0, 3.0]) == pytest.approx(1.0)


def test_dtw_empty_raises():
    with pytest.raises(EmptySequence):
        dtw_distance([], [1.0])


@pytest.mark.parametrize("trial", range(10))
def test_dtw_matches_exhaustive(trial):
    rng = np.random.default_rng(trial)
    a = rng.normal(0, 1, int(rng.integers(2, 7)))
    b = rng.normal(0, 1, int(rng.integers(2, 7)))
    assert dtw_distance(a, b) == pytest.approx(brute_dtw(list(a), list(b)))


@given(st.lists(st.floats(-50, 50), min_size=1, max_size=12),
       st.lists(st.floats(-50, 50), min_size=1, max_size=12))
@settings(max_examples=60, deadline=None)
def test_dtw_symmetric_nonnegative(a, b):
    d1 = dtw_distance(a, b)
    d2 = dtw_distance(b, a)
    assert d1 == pytest.approx(d2)
    assert d1 >= 0.0


# ---------------------------------------------------------------------------
# convergence order

@pytest.mark.parametrize("p", [1, 2, 3, 4])
def test_convergence_order_exact_power_laws(p):
    hs = [0.1, 0.05, 0.025, 0.0125]
    ladder = [(h, h ** p) for h in hs]
    order, ratio = convergence_order(ladder)
    assert order == pytest.approx(p, abs=1e-12)
    assert ratio == pytest.approx(0.5 ** p)


def test_convergence_order_errors():
    with pytest.raises(NonPositiveError):
        convergence_order([(0.1, 1.0), (0.05, 0.0), (0.025, 0.1)])
    with pytest.raises(IrregularRefinement):
        convergence_order([(0.1, 1.0), (0.03, 0.5), (0.025, 0.2)])
    with pytest.raises(IrregularRefinement):
        convergence_order([(0.1, 1.0), (0.05, 0.5)])


# ---------------------------------------------------------------------------
# tolerance equality

def test_tolerance_equality_cases():
    assert check_tolerance_equality(1.0, 1.0, 1e-6).verdict == "pass"
    assert check_tolerance_equality(1.0, 1.0 + 2e-6, 1e-6).verdict == "fail"
    assert check_tolerance_equality(0.0, 5e-7, 1e-6).verdict == "pass"
