"""Root-cause attribution: layer gating, priority, shares, neutrality."""

import copy

import numpy as np
import pytest

from semscore.engine import EquivalenceConfig, run_cell
from semscore.errors import MissingEvidence, NoKills
from semscore.kernels import PutId
from semscore.lrca import (
    KilledEvidence,
    LrcaConfig,
    PRIORITY,
    RootCause,
    annotate_campaign,
    calibrate,
    diagnose,
    h4_cutoff_sweep,
    shares,
)
from semscore.mutants import OperatorClass
from semscore.relations import MetaPattern


CFG = LrcaConfig()


def ev(put="A1", mp=MetaPattern.MP1, fail_ratio=1.0, windows=(None,),
       methods=("equality",), artefact=False, overrides=1):
    return KilledEvidence(
        mutant_id="m-test", put=PutId(put), mp=mp, fail_ratio=fail_ratio,
        killing_windows=tuple(windows), killing_methods=tuple(methods),
        artefact_flag=artefact, override_count=overrides)


def test_unstable_kill_is_tolerance_perturbation():
    ann = diagnose(ev(fail_ratio=0.5), CFG)
    assert ann.root_cause == RootCause.C2


def test_stable_clean_kill_is_true_failure():
    ann = diagnose(ev(fail_ratio=1.0), CFG)
    assert ann.root_cause == RootCause.C1
    assert ann.co_occurring == ()


def test_ood_confinement_fires_only_for_surrogate_and_ml():
    window = ((1.44, 1.5),)  # inside the outer 5% band of [-1.5, 1.5]
    c_ann = diagnose(ev(put="D3", windows=window), CFG)
    assert c_ann.root_cause == RootCause.C3
    a_ann = diagnose(ev(put="A1", windows=((1.9, 2.0),)), CFG)
    assert a_ann.root_cause == RootCause.C1  # numeric class skips the triage


def test_ood_requires_full_confinement():
    ann = diagnose(ev(put="D3", windows=((1.0, 1.5),)), CFG)
    assert ann.root_cause == RootCause.C1


def test_artefact_flag_and_over_injection():
    assert diagnose(ev(artefact=True), CFG).root_cause == RootCause.C5
    assert diagnose(ev(overrides=4), CFG).root_cause == RootCause.C5
    assert diagnose(ev(overrides=3), CFG).root_cause == RootCause.C1


def test_priority_resolution_is_maximal():
    ann = diagnose(ev(put="D3", fail_ratio=0.4, windows=((1.44, 1.5),),
                      artefact=True), CFG)
    assert ann.root_cause == RootCause.C5
    assert set(ann.co_occurring) == {RootCause.C5, RootCause.C3, RootCause.C2}
    # recorded order follows the fixed priority
    assert list(ann.co_occurring) == [c for c in PRIORITY
                                      if c in ann.co_occurring]


@pytest.mark.parametrize("trial", range(12))
def test_priority_on_randomized_cooccurrence(trial):
    rng = np.random.default_rng(trial)
    fr = float(rng.choice([0.3, 1.0]))
    art = bool(rng.choice([True, False]))
    confined = bool(rng.choice([True, False]))
    windows = ((1.44, 1.5),) if confined else (None,)
    ann = diagnose(ev(put="D3", mp=MetaPattern.MP5, fail_ratio=fr,
                      windows=windows, artefact=art), CFG)
    # the recorded causes match the triggered layers exactly
    expected = set()
    if fr < CFG.fail_ratio_cutoff:
        expected.add(RootCause.C2)
    if confined:
        expected.add(RootCause.C3)
    if art:
        expected.add(RootCause.C5)
    assert set(ann.co_occurring) == expected
    # and the label is the priority-maximal member of causes + {C1}
    pool = expected | {RootCause.C1}
    assert ann.root_cause == next(c for c in PRIORITY if c in pool)


def test_missing_evidence_raises():
    with pytest.raises(MissingEvidence):
        diagnose(ev(fail_ratio=0.0), CFG)


def test_assumption_precheck_gating():
    # healthy kernels satisfy the rank-test and warping baselines, so the
    # statistical-violation label never fires on them
    ann = diagnose(ev(put="B2", mp=MetaPattern.MP2, methods=("wilcoxon",)),
                   CFG)
    assert ann.root_cause == RootCause.C1
    ann = diagnose(ev(put="D1", mp=MetaPattern.MP4, methods=("dtw",)), CFG)
    assert ann.root_cause == RootCause.C1


# ---------------------------------------------------------------------------
# cell-level plumbing on a small real campaign slice

class _MiniCampaign:
    def __init__(self, cells):
        self.tensor = cells
        self.matrix = []


@pytest.fixture(scope="module")
def mini_campaign():
    cfg = EquivalenceConfig(k_eq=200, replicates=5)
    cells = [
        run_cell("A2", MetaPattern.MP5, OperatorClass.SI, cfg, seed=3),
        run_cell("A2", MetaPattern.MP1, OperatorClass.CE, cfg, seed=3),
        run_cell("D3", MetaPattern.MP5, OperatorClass.HP, cfg, seed=3),
    ]
    return _MiniCampaign(cells)


def test_annotation_never_changes_counts(mini_campaign):
    before = [(c.inst_count, c.equiv_count, c.killed_count, c.survive_count,
               c.sms) for c in mini_campaign.tensor]
    annotate_campaign(mini_campaign, CFG)
    after = [(c.inst_count, c.equiv_count, c.killed_count, c.survive_count,
              c.sms) for c in mini_campaign.tensor]
    assert before == after
    for cell in mini_campaign.tensor:
        for pm in cell.per_mutant:
            if pm.state.value == "killed":
                assert pm.root_cause is not None


def test_shares_requires_kills_and_annotations(mini_campaign):
    annotate_campaign(mini_campaign, CFG)
    killed_cell = next(c for c in mini_campaign.tensor if c.killed_count)
    c1, suspect = shares(killed_cell)
    assert c1 + suspect == pytest.approx(1.0)
    empty = copy.deepcopy(killed_cell)
    for pm in empty.per_mutant:
        pm.state = type(pm.state)("survived")
    with pytest.raises(NoKills):
        shares(empty)


def test_share_arithmetic():
    cell = copy.deepcopy(run_cell("A2", MetaPattern.MP5, OperatorClass.SI,
                                  EquivalenceConfig(k_eq=100, replicates=2),
                                  seed=3))
    killed = [pm for pm in cell.per_mutant if pm.state.value == "killed"]
    assert killed, "fixture cell must kill"
    for i, pm in enumerate(killed):
        pm.root_cause = "C1" if i == 0 else "C5"
    c1, suspect = shares(cell)
    assert c1 == pytest.approx(1.0 / len(killed))
    assert suspect == pytest.approx(1.0 - 1.0 / len(killed))


def test_calibration_grid_shape(mini_campaign):
    annotate_campaign(mini_campaign, CFG)
    mini_campaign.matrix = mini_campaign.tensor  # reuse cells as a matrix
    report = calibrate(mini_campaign)
    assert len(report["grid"]) == 9
    assert sum(1 for e in report["grid"] if e["best"]) == 1
    assert report["reported_primary"] == {"ood_band": 0.02,
                                          "tolerance_multiplier": 3.0}
    # a never-triggered tolerance axis leaves every share unchanged
    by_band = {}
    for entry in report["grid"]:
        by_band.setdefault(entry["ood_band"], set()).add(
            entry["mean_c1_share"])
    for band, values in by_band.items():
        assert len(values) == 1


def test_h4_sweep_monotone(mini_campaign):
    annotate_campaign(mini_campaign, CFG)
    mini_campaign.matrix = mini_campaign.tensor
    rows = h4_cutoff_sweep(mini_campaign, [0.0, 0.25, 0.5, 1.0])
    ratios = [r["ratio"] for r in rows]
    assert all(ratios[i] <= ratios[i + 1] for i in range(len(ratios) - 1))
    assert rows[-1]["cells_pass"] == rows[-1]["cells_defined"]
    with pytest.raises(ValueError):
        h4_cutoff_sweep(mini_campaign, [])
