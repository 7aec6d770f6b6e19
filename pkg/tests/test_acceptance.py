"""Acceptance gate: every shipping criterion at its stated tolerance.

Each test prints one PASS line on success so the gate reads as a checklist
under ``pytest -s tests/test_acceptance.py``. The campaign fixtures here
run the full default configuration; expect several minutes of wall time.
"""

import itertools
import time

import numpy as np
import pytest

from semscore.degeneration import (
    DegenerateLimitConfig,
    check_degeneration,
    check_lrca_trivialisation,
)
from semscore.engine import EquivalenceConfig, run_campaign
from semscore.lrca import LrcaConfig, annotate_campaign, h4_cutoff_sweep
from semscore.reporting import build_stats_report, campaign_to_payload
from semscore.stats import (
    bonferroni,
    cliffs_delta,
    friedman,
    power_plugin,
    power_stipulated,
    rank_invariance_check,
    romano_classify,
)
from semscore.verify import convergence_order, dtw_distance, \
    wilcoxon_signed_rank

pytestmark = pytest.mark.filterwarnings("ignore")


def _ok(criterion, detail=""):
    print(f"\nACCEPTANCE {criterion}: PASS {detail}")


# ---------------------------------------------------------------------------
# shared fixtures

@pytest.fixture(scope="module")
def default_campaign():
    start = time.time()
    campaign = run_campaign(EquivalenceConfig(), seed=0)
    elapsed = time.time() - start
    annotate_campaign(campaign, LrcaConfig())
    return campaign, elapsed


# ---------------------------------------------------------------------------
# 1. degenerate-limit equality, exact, < 60 s per program at the full stream

def test_criterion_1_degeneration_exact():
    cfg = DegenerateLimitConfig(k_eq=100_000)
    reports = []
    for put in ("A1", "A2", "A3"):
        start = time.time()
        rep = check_degeneration(put, cfg, seed=0)
        elapsed = time.time() - start
        assert rep["exact_equal"], f"{put}: scores differ"
        assert rep["sms"] == rep["classic_ms"]
        assert rep["killed"] == rep["label_histogram"]["C1"]
        assert rep["suspect_share"] == 0.0
        assert elapsed < 60.0, f"{put}: {elapsed:.1f}s exceeds the budget"
        reports.append(rep)
    summary = check_lrca_trivialisation(reports)
    assert summary["trivialised"]
    _ok(1, "- semantic score equals the classic score exactly on A1/A2/A3, "
           "all kills labelled C1")


# ---------------------------------------------------------------------------
# 2. partition invariant over the full default campaign

def test_criterion_2_partition_invariant(default_campaign):
    campaign, elapsed = default_campaign
    assert len(campaign.matrix) == 60
    for cell in list(campaign.tensor) + list(campaign.matrix):
        assert cell.inst_count == (cell.equiv_count + cell.killed_count
                                   + cell.survive_count), cell
        if cell.sms is not None:
            assert 0.0 <= cell.sms <= 1.0
    assert elapsed < 1800.0, f"campaign took {elapsed:.0f}s"
    _ok(2, f"- 360 cells satisfy the partition, campaign ran in "
           f"{elapsed:.0f}s")


# ---------------------------------------------------------------------------
# 3. operator-implementability reproduction in kind

def test_criterion_3_h1_in_kind(default_campaign):
    campaign, _ = default_campaign
    report = build_stats_report(campaign, seed=0,
                                headline_iterations=1000)
    support = report["hypotheses"]["support"]
    assert report["hypotheses"]["h1"] == "met"
    assert support["h1_qualifying_operators"] >= 4
    _ok(3, f"- {support['h1_qualifying_operators']} operator classes yield "
           ">=5 non-equivalent mutants on >=9 programs")


# ---------------------------------------------------------------------------
# 4. oracle equivalences

def brute_delta(a, b):
    gt = sum(x > y for x in a for y in b)
    lt = sum(x < y for x in a for y in b)
    return (gt - lt) / (len(a) * len(b))


def brute_dtw(a, b):
    best = [np.inf]

    def walk(i, j, cost):
        cost += abs(a[i] - b[j])
        if cost >= best[0]:
            return
        if i == len(a) - 1 and j == len(b) - 1:
            best[0] = cost
            return
        for di, dj in ((1, 0), (0, 1), (1, 1)):
            if i + di < len(a) and j + dj < len(b):
                walk(i + di, j + dj, cost)

    walk(0, 0, 0.0)
    return best[0]


def brute_wilcoxon_greater(diffs):
    from scipy.stats import rankdata
    d = np.asarray(diffs, dtype=float)
    d = d[d != 0]
    ranks = rankdata(np.abs(d))
    w_obs = ranks[d > 0].sum()
    ws = [sum(r for r, s in zip(ranks, signs) if s)
          for signs in itertools.product([0, 1], repeat=len(d))]
    return float(np.mean(np.asarray(ws) >= w_obs - 1e-12))


def test_criterion_4_oracle_equivalences():
    rng = np.random.default_rng(17)
    for _ in range(6):
        a = rng.normal(0, 1, int(rng.integers(2, 21)))
        b = rng.normal(0.4, 1, int(rng.integers(2, 21)))
        assert cliffs_delta(a, b) == pytest.approx(
            brute_delta(list(a), list(b)), abs=1e-15)
    for _ in range(6):
        a = rng.normal(0, 1, int(rng.integers(2, 7)))
        b = rng.normal(0, 1, int(rng.integers(2, 7)))
        assert dtw_distance(a, b) == pytest.approx(
            brute_dtw(list(a), list(b)), abs=1e-12)
    for _ in range(6):
        d = np.round(rng.normal(0.2, 1, int(rng.integers(3, 11))), 1)
        d = d[d != 0]
        if d.size == 0:
            continue
        got = wilcoxon_signed_rank(d, alternative="greater").p_value
        assert got == pytest.approx(brute_wilcoxon_greater(d), abs=1e-12)
    for _ in range(6):
        m = rng.normal(0, 1, (7, 5))
        chi2, _, w, _ = friedman(m)
        assert chi2 == pytest.approx(w * 7 * 4, abs=1e-12)
    for p in (1, 2, 3, 4):
        hs = [0.2, 0.1, 0.05, 0.025]
        order, _ = convergence_order([(h, h ** p) for h in hs])
        assert order == pytest.approx(p, abs=1e-10)
    _ok(4, "- pair counts, warping, signed-rank, concordance identity and "
           "power-law orders all match their oracles")


# ---------------------------------------------------------------------------
# 5. rank invariance under randomized strictly monotone maps

def test_criterion_5_rank_invariance():
    rng = np.random.default_rng(99)
    a = rng.uniform(0, 1, 12)
    b = rng.uniform(0, 1, 48)
    for trial in range(100):
        scale = float(rng.uniform(0.05, 8.0))
        shift = float(rng.uniform(-5.0, 5.0))
        power = float(rng.uniform(0.1, 4.0))
        kind = trial % 4
        if kind == 0:
            fn = lambda v: scale * v + shift
        elif kind == 1:
            fn = lambda v: np.expm1(scale * v) + shift
        elif kind == 2:
            fn = lambda v: np.sign(v) * abs(v) ** power
        else:
            eps = 1e-9
            fn = lambda v: np.log(np.clip(v, eps, 1 - eps)
                                  / (1 - np.clip(v, eps, 1 - eps)))
        assert rank_invariance_check(a, b, fn), trial
    _ok(5, "- delta unchanged by 100 randomized strictly monotone maps")


# ---------------------------------------------------------------------------
# 6. power machinery

def test_criterion_6_power_machinery():
    aligned = np.concatenate([np.zeros(6), np.linspace(0.05, 0.5, 6)])
    cross = np.concatenate([np.zeros(39), np.linspace(0.1, 0.7, 9)])
    assert (aligned == 0).sum() + (cross == 0).sum() == 45

    plugin = power_plugin(aligned, cross, n_sim=1500, seed=42)
    powers = [p for _, p in plugin.thresholds_and_powers]
    thresholds = [t for t, _ in plugin.thresholds_and_powers]
    assert thresholds == [0.0, 0.147, 0.330, 0.474]
    assert all(powers[i] >= powers[i + 1] for i in range(3))

    stip = power_stipulated(aligned, cross, 0.4746, n_sim=500, seed=42,
                            ci_iterations=200)
    assert abs(stip.realized_expected_delta - 0.4746) <= 0.005
    point = stip.thresholds_and_powers[0][1]
    assert point < stip.ci_positive_power
    _ok(6, f"- plug-in power nonincreasing; stipulated mixture realizes "
           f"E[delta]={stip.realized_expected_delta:.4f}; point power "
           f"{point:.3f} < CI-positive power {stip.ci_positive_power:.3f}")


# ---------------------------------------------------------------------------
# 7. formula anchors

def test_criterion_7_formula_anchors():
    assert bonferroni([0.029], 4)[0] == pytest.approx(0.116)
    assert romano_classify(0.474) == "large"

    from semscore.engine import pattern_coverage
    from semscore.relations import CAMPAIGN_PATTERNS

    class _Cell:
        def __init__(self, mp, p, f):
            self.mp, self.mr_pass_seen, self.mr_fail_seen = mp, p, f

    half = [_Cell(mp, True, False) for mp in CAMPAIGN_PATTERNS]
    assert pattern_coverage(half) == 0.5

    concordant = np.tile(np.arange(5.0), (12, 1))
    chi2, _, w, _ = friedman(concordant)
    assert chi2 == pytest.approx(48.0)
    assert w == pytest.approx(1.0)
    _ok(7, "- multiplicity, effect-threshold, coverage and concordance "
           "anchors all hold")


# ---------------------------------------------------------------------------
# 8. attribution neutrality and cutoff-sweep shape

def test_criterion_8_lrca_neutrality(default_campaign):
    campaign, _ = default_campaign
    before = campaign_to_payload(campaign)
    annotate_campaign(campaign, LrcaConfig(ood_band=0.02,
                                           tolerance_multiplier=30.0))
    after = campaign_to_payload(campaign)
    fields = ("inst_count", "equiv_count", "killed_count", "survive_count",
              "sms")
    for b, a in zip(before["matrix"] + before["tensor"],
                    after["matrix"] + after["tensor"]):
        for f in fields:
            assert b[f] == a[f]
    rows = h4_cutoff_sweep(campaign, np.round(np.arange(0.05, 0.51, 0.05), 2))
    ratios = [r["ratio"] for r in rows]
    assert all(ratios[i] <= ratios[i + 1] for i in range(len(ratios) - 1))
    _ok(8, "- annotation left every count and score bit-identical; sweep "
           "ratios nondecreasing")


# ---------------------------------------------------------------------------
# 9. byte determinism of the command surface

def test_criterion_9_byte_determinism(tmp_path):
    from semscore.cli import main
    from semscore.reporting import (CAMPAIGN_FILE, LRCA_FILE, STATS_FILE,
                                    MUTANT_MANIFEST_FILE, MR_MANIFEST_FILE)
    flags = ["--seed", "13", "--keq", "120", "--replicates", "2"]
    outs = [tmp_path / "r1", tmp_path / "r2", tmp_path / "r3"]
    assert main(["run", *flags, "--out", str(outs[0]), "--workers", "1"]) == 0
    assert main(["run", *flags, "--out", str(outs[1]), "--workers", "1"]) == 0
    assert main(["run", *flags, "--out", str(outs[2]), "--workers", "2"]) == 0
    for name in (CAMPAIGN_FILE, LRCA_FILE, STATS_FILE,
                 MUTANT_MANIFEST_FILE, MR_MANIFEST_FILE):
        ref = (outs[0] / name).read_bytes()
        assert (outs[1] / name).read_bytes() == ref, name
        assert (outs[2] / name).read_bytes() == ref, name
    _ok(9, "- result files byte-identical across reruns and worker counts "
           "(timestamps isolated in run metadata)")
