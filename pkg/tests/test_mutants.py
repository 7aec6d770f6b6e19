"""Mutant catalogue contracts: pools, prescreen, flags, syntactic set."""

import numpy as np
import pytest

from semscore.errors import NotDeterministicClass, UnknownPut
from semscore.kernels import PutId
from semscore.mutants import (
    ALIGNED_MP,
    CLASS_FLAGS,
    OperatorClass,
    catalog,
    default_probes,
    l0_prescreen,
    pool,
    syntactic_mutants,
)
from semscore.relations import MetaPattern


def test_operator_alignment_is_one_to_one():
    assert ALIGNED_MP[OperatorClass.CE] == MetaPattern.MP1
    assert ALIGNED_MP[OperatorClass.OS] == MetaPattern.MP2
    assert ALIGNED_MP[OperatorClass.HP] == MetaPattern.MP3
    assert ALIGNED_MP[OperatorClass.TF] == MetaPattern.MP4
    assert ALIGNED_MP[OperatorClass.SI] == MetaPattern.MP5
    assert len(set(ALIGNED_MP.values())) == 5


@pytest.mark.parametrize("put", list(PutId))
def test_pool_sizes_in_band(put):
    records = pool(put)
    assert 10 <= len(records) <= 30
    assert all(r.put == put for r in records)


def test_pool_is_stable_data():
    first = [r.mutant_id for r in pool("C2")]
    second = [r.mutant_id for r in pool("C2")]
    assert first == second


def test_catalog_contains_named_exemplars():
    a1_tf = [r.description for r in catalog("A1", OperatorClass.TF)]
    assert any("y/z swap" in d for d in a1_tf)
    b2_os = [r.description for r in catalog("B2", OperatorClass.OS)]
    assert any("min(0.95, r)" in d for d in b2_os)
    a2_si = [r.description for r in catalog("A2", OperatorClass.SI)]
    assert any("no pivoting" in d for d in a2_si)


def test_catalog_unknown_put():
    with pytest.raises(UnknownPut):
        catalog("Q7", OperatorClass.CE)
    with pytest.raises(UnknownPut):
        pool("Q7")


def test_semanticity_flags_follow_class_profile():
    for put in PutId:
        for rec in pool(put):
            assert rec.kind == "semantic"
            assert rec.semanticity == CLASS_FLAGS[rec.operator]
            assert rec.semanticity.any()


def test_flag_profile_shape():
    assert CLASS_FLAGS[OperatorClass.OS].crosses_boundary
    assert CLASS_FLAGS[OperatorClass.OS].domain_knowledge
    assert CLASS_FLAGS[OperatorClass.HP].domain_knowledge
    assert not CLASS_FLAGS[OperatorClass.HP].changes_class
    for op in (OperatorClass.TF, OperatorClass.SI):
        assert CLASS_FLAGS[op].domain_knowledge
        assert CLASS_FLAGS[op].changes_class
    ce = CLASS_FLAGS[OperatorClass.CE]
    assert (ce.crosses_boundary, ce.domain_knowledge, ce.changes_class) == \
        (False, True, False)


def test_every_pool_entry_passes_prescreen():
    for put in PutId:
        probes = default_probes(put)
        for rec in pool(put):
            verdict = l0_prescreen(rec, probes)
            assert verdict.accepted, (rec.mutant_id, verdict.reason)


def test_prescreen_rejects_identical_variant():
    rec = pool("A2")[0]
    clone = type(rec)(
        mutant_id="A2-CLONE", put=rec.put, operator=rec.operator,
        kind="semantic", semanticity=rec.semanticity, artefact_flag=False,
        description="no-op", overrides=())
    verdict = l0_prescreen(clone, default_probes("A2"))
    assert not verdict.accepted
    assert "trivial" in verdict.reason


def test_prescreen_rejects_non_finite_variant():
    rec = pool("A1")[0]
    broken = type(rec)(
        mutant_id="A1-NAN", put=rec.put, operator=rec.operator,
        kind="semantic", semanticity=rec.semanticity, artefact_flag=False,
        description="overflows",
        overrides=(("drift_x", 1e200), ("clamp_threshold", float("inf"))))
    verdict = l0_prescreen(broken, default_probes("A1"))
    assert not verdict.accepted
    assert "non-finite" in verdict.reason


def test_probe_layout():
    probes = default_probes("A1")
    lo, hi = -2.0, 2.0
    assert probes[0] == lo and probes[-1] == hi
    assert len(probes) == 18


def test_operator_coverage_supports_h1():
    qualifying = 0
    for op in OperatorClass:
        puts = sum(1 for put in PutId if len(catalog(put, op)) >= 5)
        if puts >= 9:
            qualifying += 1
    assert qualifying >= 4


def test_artefact_fixtures_two_per_class():
    counts = {op: 0 for op in OperatorClass}
    for put in PutId:
        for rec in pool(put):
            if rec.artefact_flag:
                counts[rec.operator] += 1
                assert len(rec.overrides) > 3  # over-injection by design
    assert all(v >= 2 for v in counts.values())


def test_syntactic_restricted_to_numeric_class():
    for put in ("A1", "A2", "A3"):
        records = syntactic_mutants(put)
        assert len(records) >= 5
        assert all(r.kind == "syntactic" for r in records)
        assert all(not r.semanticity.any() for r in records)
        assert all(not r.artefact_flag for r in records)
        descriptions = " ".join(r.description for r in records)
        assert "constant perturbation" in descriptions
        assert "arithmetic operator swap" in descriptions
        assert "comparison operator swap" in descriptions
    for put in ("B2", "C1", "D3"):
        with pytest.raises(NotDeterministicClass):
            syntactic_mutants(put)


def test_mutant_programs_execute():
    rng = np.random.default_rng(0)
    for put in PutId:
        lo, hi = pool(put)[0].program().descriptor().input_domain
        xs = rng.uniform(lo, hi, 3)
        for rec in pool(put)[:4]:
            out = rec.program().evaluate(xs, seed=1)
            assert out.shape == (3,)
