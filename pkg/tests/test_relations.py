"""Relation catalogue contracts: density matrix, transforms, baseline health."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semscore.errors import UnknownPut
from semscore.kernels import PutId, original
from semscore.relations import (
    CAMPAIGN_PATTERNS,
    CellDensity,
    MetaPattern,
    density,
    mr_manifest,
    mrs_for,
    primary_mp,
)
from semscore.verify import avp_verify


def test_density_tallies_30_24_6():
    counts = {CellDensity.SUBSTANTIAL: 0, CellDensity.MODERATE: 0,
              CellDensity.VACANT: 0}
    for put in PutId:
        for mp in CAMPAIGN_PATTERNS:
            counts[density(put, mp)] += 1
    assert counts[CellDensity.SUBSTANTIAL] == 30
    assert counts[CellDensity.MODERATE] == 24
    assert counts[CellDensity.VACANT] == 6


def test_density_fixture_cells():
    assert density("A2", MetaPattern.MP2) == CellDensity.VACANT
    assert density("D3", MetaPattern.MP4) == CellDensity.VACANT
    assert density("B3", MetaPattern.MP5) == CellDensity.VACANT
    assert density("B2", MetaPattern.MP3) == CellDensity.SUBSTANTIAL
    assert density("C1", MetaPattern.MP5) == CellDensity.SUBSTANTIAL


def test_density_unknown_put():
    with pytest.raises(UnknownPut):
        density("E4", MetaPattern.MP1)


def test_primary_patterns():
    assert primary_mp("C1") == MetaPattern.MP5
    assert primary_mp("C2") == MetaPattern.MP5
    assert primary_mp("D1") == MetaPattern.MP2
    assert primary_mp("D2") == MetaPattern.MP2
    assert primary_mp("A1") == MetaPattern.MP1
    assert primary_mp("B2") == MetaPattern.MP2
    with pytest.raises(UnknownPut):
        primary_mp("X0")


def test_every_primary_cell_is_substantial():
    for put in PutId:
        assert density(put, primary_mp(put)) == CellDensity.SUBSTANTIAL


def test_mr_counts_match_density():
    for put in PutId:
        for mp in CAMPAIGN_PATTERNS:
            mrs = mrs_for(put, mp)
            cell = density(put, mp)
            if cell == CellDensity.VACANT:
                assert mrs == []
            elif cell == CellDensity.MODERATE:
                assert len(mrs) >= 1
            else:
                assert len(mrs) >= 2


def test_vacant_cells_empty_and_fixture_rows():
    assert mrs_for("A2", MetaPattern.MP2) == []
    assert mrs_for("D3", MetaPattern.MP4) == []
    assert len(mrs_for("C1", MetaPattern.MP5)) >= 2


def test_mrs_for_unknown_put():
    with pytest.raises(UnknownPut):
        mrs_for("E9", MetaPattern.MP1)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0), st.integers(0, 83))
def test_input_transforms_stay_in_domain(frac, idx):
    rows = [(put, mr) for put in PutId
            for mp in CAMPAIGN_PATTERNS
            for mr in mrs_for(put, mp)]
    put, mr = rows[idx % len(rows)]
    lo, hi = original(put).descriptor().input_domain
    x = lo + frac * (hi - lo)
    for follow in mr.input_transform(x):
        assert lo - 1e-9 <= follow <= hi + 1e-9, mr.mr_id


@pytest.mark.parametrize("put", list(PutId))
def test_baseline_relations_pass_on_original(put):
    prog = original(put)
    for mp in CAMPAIGN_PATTERNS:
        for mr in mrs_for(put, mp):
            for seed in (0, 7):
                verdict = avp_verify(prog, mr, seed=seed)
                assert verdict.passed, (mr.mr_id, seed, verdict.detail)


def test_conservation_baseline_pass_rate():
    # conservation relations hold on virtually every sampled source point
    passes = trials = 0
    for put in PutId:
        prog = original(put)
        for mr in mrs_for(put, MetaPattern.MP1):
            for seed in range(10):
                trials += 1
                passes += avp_verify(prog, mr, seed=seed).passed
    assert passes / trials >= 0.99


def test_manifest_lists_every_relation():
    rows = mr_manifest()
    assert len(rows) == sum(len(mrs_for(p, mp)) for p in PutId
                            for mp in CAMPAIGN_PATTERNS)
    sample = rows[0]
    assert {"mr_id", "put", "mp", "description", "tolerance",
            "replicate_sensitive"} <= set(sample)
