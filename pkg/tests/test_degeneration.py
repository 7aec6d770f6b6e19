"""Degenerate-limit checks: exact score equality and label collapse."""

import pytest

from semscore.degeneration import (
    DegenerateLimitConfig,
    check_degeneration,
    check_lrca_trivialisation,
    classic_ms,
    equality_relation,
)
from semscore.errors import (
    ConfigIncomplete,
    TrivialisationViolated,
    UnknownMetaPattern,
)
from semscore.kernels import PutId, original
from semscore.mutants import MutantRecord, SYNTACTIC_FLAGS, OperatorClass, \
    syntactic_mutants
from semscore.verify import avp_verify

# a reduced stream keeps unit runs quick; the acceptance suite runs the
# full-size configuration
FAST = DegenerateLimitConfig(k_eq=10_000)


def test_partial_configs_rejected():
    for broken in (
        DegenerateLimitConfig(eps_eq=1e-6),
        DegenerateLimitConfig(k_eq=100),
        DegenerateLimitConfig(eps_avp=0.5),
        DegenerateLimitConfig(equality_pattern_only=False),
        DegenerateLimitConfig(syntactic_operators=False),
        DegenerateLimitConfig(deterministic_puts=("A1", "B2")),
    ):
        with pytest.raises(ConfigIncomplete):
            broken.validate()


def test_classic_ms_identity_counts_equivalent():
    records = syntactic_mutants("A2")
    clone = MutantRecord(
        mutant_id="A2-SYN-CLONE", put=PutId.A2, operator=OperatorClass.CE,
        kind="syntactic", semanticity=SYNTACTIC_FLAGS, artefact_flag=False,
        description="no-op", overrides=())
    ms, killed, equiv, states = classic_ms("A2", records + [clone],
                                           k_eq=2000, seed=1)
    assert states["A2-SYN-CLONE"].value == "equivalent"
    assert equiv == 1
    assert killed == len(records)
    assert 0.0 <= ms <= 1.0


def test_classic_ms_rejects_semantic_records():
    from semscore.mutants import pool
    with pytest.raises(ValueError):
        classic_ms("A2", [pool("A2")[0]], k_eq=500, seed=0)


@pytest.mark.parametrize("put", ["A1", "A2", "A3"])
def test_degeneration_exact_equality(put):
    report = check_degeneration(put, FAST, seed=11)
    assert report["exact_equal"]
    assert report["sms"] == report["classic_ms"]
    assert report["killed"] + report["equivalent"] <= report["mutants"]
    assert report["label_histogram"]["C1"] == report["killed"]
    assert report["suspect_share"] == 0.0


def test_trivialisation_over_reports():
    reports = [check_degeneration(p, FAST, seed=4) for p in ("A2",)]
    summary = check_lrca_trivialisation(reports)
    assert summary["trivialised"]
    assert summary["c1_labelled"] == summary["killed"]


def test_trivialisation_flags_artefact_injection():
    flagged = MutantRecord(
        mutant_id="A2-SYN-ART", put=PutId.A2, operator=OperatorClass.CE,
        kind="syntactic", semanticity=SYNTACTIC_FLAGS, artefact_flag=True,
        description="constant perturbation, artefact-flagged control",
        overrides=(("diag_base", 4.2),))
    report = check_degeneration("A2", FAST, seed=4, extra_mutants=[flagged])
    with pytest.raises(TrivialisationViolated):
        check_lrca_trivialisation([report])


def test_equality_pattern_guarded_outside_degenerate_mode():
    mr = equality_relation(PutId.A2, FAST, seed=0)
    with pytest.raises(UnknownMetaPattern):
        avp_verify(original("A2"), mr, seed=0)
    verdict = avp_verify(original("A2"), mr, seed=0, allow_equality=True)
    assert verdict.passed


def test_equality_relation_kills_nan_producers():
    nan_mutant = MutantRecord(
        mutant_id="A1-SYN-NAN", put=PutId.A1, operator=OperatorClass.CE,
        kind="syntactic", semanticity=SYNTACTIC_FLAGS, artefact_flag=False,
        description="constant perturbation that overflows",
        overrides=(("drift_x", 1e200), ("clamp_threshold", float("inf"))))
    cfg = DegenerateLimitConfig(k_eq=10_000)
    mr = equality_relation(PutId.A1, cfg, seed=2)
    verdict = avp_verify(nan_mutant.program(), mr, seed=2,
                         allow_equality=True)
    assert not verdict.passed
    ms, killed, _, _ = classic_ms("A1", [nan_mutant], k_eq=10_000, seed=2)
    assert killed == 1 and ms == 1.0


def test_monotone_in_stream_length():
    # an equivalent-on-short-streams variant can only lose that status as
    # the stream grows (checked on extended prefixes of one stream)
    records = syntactic_mutants("A1")
    short = classic_ms("A1", records, k_eq=2000, seed=9)[2]
    longer = classic_ms("A1", records, k_eq=20_000, seed=9)[2]
    assert longer <= short
