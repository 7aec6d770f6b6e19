"""Hypothesis verdicts on synthetic campaigns and remaining edge contracts."""

import numpy as np
import pytest

from semscore.engine import CellResult, MutantState, PerMutant
from semscore.errors import IncompleteInput, UnreachableTarget
from semscore.kernels import PutId
from semscore.lrca import RootCause, _ASSUMPTION_CACHE, LrcaConfig, diagnose
from semscore.mutants import OperatorClass
from semscore.relations import CAMPAIGN_PATTERNS, MetaPattern, primary_mp
from semscore.stats import evaluate_hypotheses, power_stipulated


def _cell(put, mp, operator, inst, killed, c1_kills=None, aligned=None):
    survive = inst - killed
    per = []
    for i in range(killed):
        cause = "C1" if (c1_kills is None or i < c1_kills) else "C5"
        per.append(PerMutant(f"{put.value}-{mp.value}-{i}",
                             operator.value if operator else "CE",
                             MutantState.KILLED, 1.0, ("mr",), False, 1,
                             root_cause=cause))
    for i in range(survive):
        per.append(PerMutant(f"{put.value}-{mp.value}-s{i}",
                             operator.value if operator else "CE",
                             MutantState.SURVIVED, 0.0))
    killed_frac = killed / inst if inst else None
    c1 = None
    suspect = None
    if killed:
        n_c1 = c1_kills if c1_kills is not None else killed
        c1 = n_c1 / killed
        suspect = 1.0 - c1
    return CellResult(
        put=put, mp=mp, operator=operator,
        inst_count=inst, equiv_count=0, killed_count=killed,
        survive_count=survive, sms=killed_frac,
        inst_rate=1.0, equiv_rate=0.0, survive_rate=survive / inst,
        per_mutant=per, aligned=aligned,
        mr_pass_seen=True, mr_fail_seen=killed > 0,
        c1_share=c1, suspect_share=suspect)


class _Synthetic:
    """Fabricated campaign: aligned cells at a chosen score, cross at zero."""

    def __init__(self, aligned_killed=6, cross_killed=0, c1_kills=None):
        self.tensor = []
        self.matrix = []
        for put in PutId:
            for mp in CAMPAIGN_PATTERNS:
                aligned = mp == primary_mp(put)
                killed = aligned_killed if aligned else cross_killed
                self.matrix.append(_cell(put, mp, None, 6,
                                         min(killed, 6), c1_kills, aligned))
                for op in OperatorClass:
                    self.tensor.append(_cell(put, mp, op, 6,
                                             min(killed, 6), c1_kills))


def _stats(campaign):
    aligned = [c.sms for c in campaign.matrix if c.aligned]
    cross = [c.sms for c in campaign.matrix if not c.aligned]
    from semscore.stats import cliffs_delta, odds_ratios, sign_test
    delta = cliffs_delta(aligned, cross)
    nz, _ = odds_ratios(np.asarray(aligned), np.asarray(cross))
    deltas = []
    for cls in "ABCD":
        a = [c.sms for c in campaign.matrix
             if c.aligned and c.put.value[0] == cls]
        x = [c.sms for c in campaign.matrix
             if not c.aligned and c.put.value[0] == cls]
        deltas.append(float(np.mean(a) - np.mean(x)))
    positives, total, p = sign_test(deltas)
    cv = 0.0 if len(set(deltas)) == 1 else None
    return {"delta": delta, "nonzero_odds_ratio": nz,
            "sign_test": (positives, total, p), "cv_delta_sms": cv}


def test_extremal_fixture_meets_h2_and_h4():
    campaign = _Synthetic(aligned_killed=6, cross_killed=0)
    verdicts = evaluate_hypotheses(campaign, _stats(campaign))
    assert verdicts.h2 == "met"     # delta = 1, odds ratio far above 3
    assert verdicts.h4 == "met"     # every kill is a true failure
    assert verdicts.h3 == "met"     # 4/4 positive with zero spread


def test_three_of_four_classes_positive_is_partial():
    campaign = _Synthetic(aligned_killed=6, cross_killed=0)
    # invert the D class: its aligned cells go to zero kills
    for cell in campaign.matrix:
        if cell.aligned and cell.put.value[0] == "D":
            cell.killed_count = 0
            cell.survive_count = cell.inst_count
            cell.sms = 0.0
            cell.per_mutant = []
            cell.c1_share = cell.suspect_share = None
    verdicts = evaluate_hypotheses(campaign, _stats(campaign))
    assert verdicts.h3 == "partial"


def test_all_suspect_kills_fail_h4():
    campaign = _Synthetic(aligned_killed=6, cross_killed=0, c1_kills=0)
    verdicts = evaluate_hypotheses(campaign, _stats(campaign))
    assert verdicts.h4 == "not_met"


def test_incomplete_input_raises():
    campaign = _Synthetic()
    campaign.matrix[0].killed_count = 2
    campaign.matrix[0].c1_share = None
    with pytest.raises(IncompleteInput):
        evaluate_hypotheses(campaign, _stats(_Synthetic()))


def test_killed_determination_needs_passing_original():
    from semscore.engine import killed_determination
    from semscore.kernels import original
    from semscore.relations import MrInstance

    # a relation the original itself fails can never witness a kill
    broken = MrInstance(
        mr_id="A2-ALWAYS-FAIL", put=PutId.A2, mp=MetaPattern.MP1,
        description="unsatisfiable residual", tolerance=1e-9,
        input_transform=lambda x: [x],
        _residuals=lambda program, seed: np.array([1.0]))
    orig = original("A2")
    mutant = original("A2")
    assert not killed_determination(orig, mutant, [broken], seed=0)


def test_c4_gating_by_class():
    # force the assumption pre-check to report a violation
    for put in ("B2", "A1"):
        _ASSUMPTION_CACHE[(PutId(put), "wilcoxon", 3.0)] = True
    try:
        from semscore.lrca import KilledEvidence
        ev_b = KilledEvidence("m", PutId.B2, MetaPattern.MP2, 1.0, (None,),
                              ("wilcoxon",), False, 1)
        assert diagnose(ev_b, LrcaConfig()).root_cause == RootCause.C4
        # the numeric class never reaches the statistical layer
        ev_a = KilledEvidence("m", PutId.A1, MetaPattern.MP2, 1.0, (None,),
                              ("wilcoxon",), False, 1)
        assert diagnose(ev_a, LrcaConfig()).root_cause == RootCause.C1
    finally:
        _ASSUMPTION_CACHE.pop((PutId.B2, "wilcoxon", 3.0), None)
        _ASSUMPTION_CACHE.pop((PutId.A1, "wilcoxon", 3.0), None)


def test_stipulated_target_at_observed_boundary_rejected():
    aligned = np.array([0.0, 0.2, 0.4])
    cross = np.array([0.0, 0.1, 0.3])
    from semscore.stats import cliffs_delta
    observed = cliffs_delta(aligned, cross)
    with pytest.raises(UnreachableTarget):
        power_stipulated(aligned, cross, observed)  # strict inequality
