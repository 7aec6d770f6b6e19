"""The measurement core: equivalence, kills, scores, cells, campaigns.

A mutant is judged equivalent by the conjunction of output agreement on
sampled inputs (the cheap check, run first) and verdict coherence over the
cell's relation set. Non-equivalent mutants face the relation set across
replicates; a kill in any replicate kills the mutant, with the replicate
fail ratio kept for root-cause analysis.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from .errors import AllEquivalent
from .kernels import Program, PutId, original
from .mutants import OperatorClass, catalog
from .relations import (
    CAMPAIGN_PATTERNS,
    MetaPattern,
    mrs_for,
    primary_mp,
)
from .rng import stream, substream_seed
from .verify import avp_verify


@dataclass(frozen=True)
class EquivalenceConfig:
    k_eq: int = 1000
    eps_eq: float = 1e-6
    mode: str = "E1_and_E2"  # E1_and_E2 | E1_only | E2_only
    replicates: int = 20

    def __post_init__(self):
        if self.k_eq < 1:
            raise ValueError("k_eq must be >= 1")
        if self.eps_eq < 0:
            raise ValueError("eps_eq must be nonnegative")
        if self.mode not in ("E1_and_E2", "E1_only", "E2_only"):
            raise ValueError(f"unknown equivalence mode {self.mode!r}")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")


class MutantState(str, Enum):
    EQUIVALENT = "equivalent"
    KILLED = "killed"
    SURVIVED = "survived"


@dataclass
class PerMutant:
    mutant_id: str
    operator: str
    state: MutantState
    fail_ratio: float
    killed_by: Tuple[str, ...] = ()
    artefact_flag: bool = False
    override_count: int = 0
    root_cause: Optional[str] = None
    co_occurring: Tuple[str, ...] = ()


@dataclass
class CellResult:
    put: PutId
    mp: MetaPattern
    operator: Optional[OperatorClass]
    inst_count: int
    equiv_count: int
    killed_count: int
    survive_count: int
    sms: Optional[float]
    inst_rate: float
    equiv_rate: float
    survive_rate: float
    per_mutant: List[PerMutant] = field(default_factory=list)
    aligned: Optional[bool] = None
    mr_pass_seen: bool = False
    mr_fail_seen: bool = False
    c1_share: Optional[float] = None
    suspect_share: Optional[float] = None

    def check_partition(self):
        assert self.inst_count == (self.equiv_count + self.killed_count
                                   + self.survive_count)


# ---------------------------------------------------------------------------
# verdict caching (pure function of (program, relation, seed))

_VERDICTS: dict = {}


def _verdict(program: Program, mr, seed: int):
    key = (program.key(), mr.mr_id, seed)
    hit = _VERDICTS.get(key)
    if hit is None:
        # campaign cells never carry the equality pattern; it reaches the
        # engine only through the degenerate-limit check
        hit = avp_verify(program, mr, seed=seed,
                         allow_equality=mr.mp == MetaPattern.MP_EQ)
        if len(_VERDICTS) > 200_000:
            _VERDICTS.clear()
        _VERDICTS[key] = hit
    return hit


def _mr_seed(campaign_seed: int, mr, replicate: int) -> int:
    rep = replicate if mr.replicate_sensitive else 0
    return substream_seed("avp", campaign_seed, mr.mr_id, rep)


# ---------------------------------------------------------------------------
# equivalence judgement

_E2_REF: dict = {}


def e2_output_equivalence(orig: Program, mutant: Program,
                          cfg: EquivalenceConfig, seed: int) -> bool:
    """Output agreement within eps on k_eq shared samples of the domain."""
    lo, hi = orig.descriptor().input_domain
    rng = stream("e2", seed, orig.put.value)
    xs = rng.uniform(lo, hi, cfg.k_eq)
    sample_seed = substream_seed("e2-eval", seed, orig.put.value)
    ref_key = (orig.key(), seed, cfg.k_eq)
    ref = _E2_REF.get(ref_key)
    if ref is None:
        ref = orig.evaluate(xs, seed=sample_seed)
        if len(_E2_REF) > 64:
            _E2_REF.clear()
        _E2_REF[ref_key] = ref
    out = mutant.evaluate(xs, seed=sample_seed)
    if not np.all(np.isfinite(out)):
        return False
    return bool(np.all(np.abs(ref - out) <= cfg.eps_eq))


def e1_avp_coherence(orig: Program, mutant: Program, mrs, seed: int) -> bool:
    """Identical relation verdicts on original and mutant (vacuous if empty)."""
    for mr in mrs:
        vseed = _mr_seed(seed, mr, 0)
        if _verdict(orig, mr, vseed).passed != _verdict(mutant, mr, vseed).passed:
            return False
    return True


def classify_mutant(orig: Program, mutant: Program, mrs,
                    cfg: EquivalenceConfig, seed: int) -> MutantState:
    """Three-state decision; the cheap output check runs before coherence."""
    e2 = e2_output_equivalence(orig, mutant, cfg, seed)
    if cfg.mode == "E2_only":
        equivalent = e2
    elif cfg.mode == "E1_only":
        equivalent = e1_avp_coherence(orig, mutant, mrs, seed)
    else:
        # short-circuit: coherence is only consulted after output agreement
        equivalent = e2 and e1_avp_coherence(orig, mutant, mrs, seed)
    if equivalent:
        return MutantState.EQUIVALENT
    if killed_determination(orig, mutant, mrs, seed):
        return MutantState.KILLED
    return MutantState.SURVIVED


def killed_determination(orig: Program, mutant: Program, mrs,
                         seed: int, replicate: int = 0) -> bool:
    """OR-aggregation: one relation passing the original and failing the
    mutant suffices."""
    for mr in mrs:
        vseed = _mr_seed(seed, mr, replicate)
        if (_verdict(orig, mr, vseed).passed
                and not _verdict(mutant, mr, vseed).passed):
            return True
    return False


def compute_sms(inst: int, equiv: int, killed: int) -> float:
    """killed / (inst - equiv); undefined when every mutant is equivalent."""
    if inst < equiv + killed:
        raise ValueError("counts violate the partition")
    if inst == equiv:
        raise AllEquivalent("all mutants equivalent; score undefined")
    return killed / (inst - equiv)


def false_equiv_bound(k_eq: int, p: float) -> float:
    """Chance that k_eq independent samples all miss a disagreement region
    of probability mass p."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be a probability")
    if k_eq < 1:
        raise ValueError("k_eq must be >= 1")
    return float((1.0 - p) ** k_eq)


# ---------------------------------------------------------------------------
# cells

def _killing_mrs(orig, mutant, mrs, seed, replicate):
    out = []
    for mr in mrs:
        vseed = _mr_seed(seed, mr, replicate)
        if (_verdict(orig, mr, vseed).passed
                and not _verdict(mutant, mr, vseed).passed):
            out.append(mr.mr_id)
    return out


def run_cell(put, mp, operator, config: EquivalenceConfig, seed: int,
             records=None) -> CellResult:
    """Adjudicate one (program, pattern, operator) cell."""
    put = PutId(put)
    mp = MetaPattern(mp)
    operator = OperatorClass(operator)
    mrs = mrs_for(put, mp)
    records = catalog(put, operator) if records is None else records
    orig = original(put)

    per = []
    pass_seen = fail_seen = False
    counts = {MutantState.EQUIVALENT: 0, MutantState.KILLED: 0,
              MutantState.SURVIVED: 0}
    for mr in mrs:
        v = _verdict(orig, mr, _mr_seed(seed, mr, 0))
        pass_seen |= v.passed
        fail_seen |= not v.passed

    for rec in records:
        mut = rec.program()
        state = classify_mutant(orig, mut, mrs, config, seed)
        fail_ratio = 0.0
        killed_by = ()
        if state != MutantState.EQUIVALENT:
            kills = 0
            killers = []
            for rep in range(config.replicates):
                hit = _killing_mrs(orig, mut, mrs, seed, rep)
                if hit:
                    kills += 1
                    killers.extend(hit)
            fail_ratio = kills / config.replicates
            state = MutantState.KILLED if kills else MutantState.SURVIVED
            killed_by = tuple(sorted(set(killers)))
        for mr in mrs:
            v = _verdict(mut, mr, _mr_seed(seed, mr, 0))
            pass_seen |= v.passed
            fail_seen |= not v.passed
        counts[state] += 1
        per.append(PerMutant(rec.mutant_id, rec.operator.value, state,
                             fail_ratio, killed_by, rec.artefact_flag,
                             len(rec.overrides)))

    inst = len(records)
    equiv = counts[MutantState.EQUIVALENT]
    killed = counts[MutantState.KILLED]
    survive = counts[MutantState.SURVIVED]
    try:
        sms = compute_sms(inst, equiv, killed)
    except AllEquivalent:
        sms = None
    cell = CellResult(
        put=put, mp=mp, operator=operator,
        inst_count=inst, equiv_count=equiv, killed_count=killed,
        survive_count=survive, sms=sms,
        inst_rate=1.0 if inst else 0.0,
        equiv_rate=equiv / inst if inst else 0.0,
        survive_rate=survive / inst if inst else 0.0,
        per_mutant=per,
        mr_pass_seen=pass_seen, mr_fail_seen=fail_seen,
    )
    cell.check_partition()
    return cell


def _pool_cells(put, mp, tensor_cells) -> CellResult:
    """Project the operator axis away for one (program, pattern) cell."""
    put = PutId(put)
    mp = MetaPattern(mp)
    mine = [c for c in tensor_cells
            if c.put == put and c.mp == mp]
    inst = sum(c.inst_count for c in mine)
    equiv = sum(c.equiv_count for c in mine)
    killed = sum(c.killed_count for c in mine)
    survive = sum(c.survive_count for c in mine)
    per = [pm for c in mine for pm in c.per_mutant]
    try:
        sms = compute_sms(inst, equiv, killed)
    except AllEquivalent:
        sms = None
    cell = CellResult(
        put=put, mp=mp, operator=None,
        inst_count=inst, equiv_count=equiv, killed_count=killed,
        survive_count=survive, sms=sms,
        inst_rate=1.0 if inst else 0.0,
        equiv_rate=equiv / inst if inst else 0.0,
        survive_rate=survive / inst if inst else 0.0,
        per_mutant=per,
        aligned=(mp == primary_mp(put)),
        mr_pass_seen=any(c.mr_pass_seen for c in mine),
        mr_fail_seen=any(c.mr_fail_seen for c in mine),
    )
    cell.check_partition()
    return cell


def _put_tensor(args):
    put_value, config, seed = args
    put = PutId(put_value)
    cells = []
    for mp in CAMPAIGN_PATTERNS:
        for op in OperatorClass:
            cells.append(run_cell(put, mp, op, config, seed))
    return cells


@dataclass
class CampaignResult:
    tensor: List[CellResult]
    matrix: List[CellResult]
    config: EquivalenceConfig
    seed: int

    def aligned_cells(self):
        return [c for c in self.matrix if c.aligned]

    def cross_cells(self):
        return [c for c in self.matrix if not c.aligned]


def run_campaign(config: EquivalenceConfig, seed: int,
                 workers: int = 1) -> CampaignResult:
    """Full (12 x 5 x 5) tensor plus the pooled 60-cell projection."""
    jobs = [(p.value, config, seed) for p in PutId]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_put_tensor, jobs))
    else:
        chunks = [_put_tensor(j) for j in jobs]
    tensor = [c for chunk in chunks for c in chunk]
    matrix = [_pool_cells(p, mp, tensor)
              for p in PutId for mp in CAMPAIGN_PATTERNS]
    return CampaignResult(tensor=tensor, matrix=matrix, config=config,
                          seed=seed)


def pattern_coverage(put_results) -> float:
    """Fraction of (pattern, outcome) combinations a program's cells hit."""
    seen = set()
    for cell in put_results:
        if cell.mr_pass_seen:
            seen.add((cell.mp, True))
        if cell.mr_fail_seen:
            seen.add((cell.mp, False))
    return len(seen) / (2 * len(CAMPAIGN_PATTERNS))
