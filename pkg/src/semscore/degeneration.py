"""Executable check that the semantic score collapses to the classic score.

Under the joint degenerate limit (zero tolerances, a large shared sample
stream, the bare equality pattern, rule-based syntactic variants, and the
deterministic numeric programs) the engine's score must equal the classic
mutation score computed by exact difference detection on the same stream,
and every kill must attribute to a true semantic failure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .engine import (
    EquivalenceConfig,
    MutantState,
    classify_mutant,
    compute_sms,
)
from .errors import (
    AllEquivalent,
    ConfigIncomplete,
    MismatchDetected,
    TrivialisationViolated,
)
from .kernels import Program, PutClass, PutId, original, put_class
from .lrca import LrcaConfig, RootCause, diagnose, KilledEvidence
from .mutants import syntactic_mutants
from .relations import MetaPattern, MrInstance
from .rng import stream, substream_seed


@dataclass(frozen=True)
class DegenerateLimitConfig:
    eps_eq: float = 0.0
    k_eq: int = 100_000
    eps_avp: float = 0.0
    equality_pattern_only: bool = True
    syntactic_operators: bool = True
    deterministic_puts: Tuple[str, ...] = ("A1", "A2", "A3")

    def validate(self):
        """All six axes must be set jointly; partial limits are rejected."""
        problems = []
        if self.eps_eq != 0.0:
            problems.append("output tolerance not collapsed to zero")
        if self.k_eq < 10_000:
            problems.append("sample stream too short for the limit")
        if self.eps_avp != 0.0:
            problems.append("verdict tolerance not collapsed to zero")
        if not self.equality_pattern_only:
            problems.append("pattern set not reduced to bare equality")
        if not self.syntactic_operators:
            problems.append("operator source not switched to syntactic rules")
        for p in self.deterministic_puts:
            if put_class(PutId(p)) != PutClass.NUMERIC:
                problems.append(f"{p} is outside the deterministic subset")
        if problems:
            raise ConfigIncomplete("; ".join(problems))


def _shared_stream(put: PutId, cfg: DegenerateLimitConfig, seed: int):
    """The one sample stream both score computations consume."""
    lo, hi = original(put).descriptor().input_domain
    xs = stream("e2", seed, put.value).uniform(lo, hi, cfg.k_eq)
    eval_seed = substream_seed("e2-eval", seed, put.value)
    return xs, eval_seed


def equality_relation(put: PutId, cfg: DegenerateLimitConfig,
                      seed: int) -> MrInstance:
    """Identity transform; violation is any exact output difference from the
    reference program on the shared stream."""
    xs, eval_seed = _shared_stream(put, cfg, seed)
    ref = original(put).evaluate(xs, seed=eval_seed)

    def residuals(program: Program, _seed):
        out = program.evaluate(xs, seed=eval_seed)
        res = out - ref
        # exact comparison: any NaN is a difference, not a missing value
        res = np.where(np.isnan(out), np.inf, res)
        return res

    return MrInstance(
        mr_id=f"{put.value}-EQ",
        put=put,
        mp=MetaPattern.MP_EQ,
        description="identity transform; outputs must match the reference "
                    "program exactly on the shared sample stream",
        tolerance=0.0,
        input_transform=lambda x: [x],
        relation=lambda lhs, rhs, _eps: lhs == rhs,
        _residuals=residuals,
    )


def classic_ms(put, mutants, k_eq: int, seed: int):
    """Classical score: exact difference detection on sampled inputs."""
    put = PutId(put)
    cfg = DegenerateLimitConfig(k_eq=k_eq)
    xs, eval_seed = _shared_stream(put, cfg, seed)
    ref = original(put).evaluate(xs, seed=eval_seed)
    killed = equiv = 0
    states = {}
    for rec in mutants:
        if rec.kind != "syntactic":
            raise ValueError(f"{rec.mutant_id} is not a syntactic variant")
        out = rec.program().evaluate(xs, seed=eval_seed)
        same = np.equal(out, ref)  # NaN compares unequal, hence a kill
        if bool(np.all(same)):
            equiv += 1
            states[rec.mutant_id] = MutantState.EQUIVALENT
        else:
            killed += 1
            states[rec.mutant_id] = MutantState.KILLED
    ms = compute_sms(len(mutants), equiv, killed)
    return ms, killed, equiv, states


def check_degeneration(put, cfg: DegenerateLimitConfig, seed: int,
                       extra_mutants=()) -> dict:
    """Run the engine under the degenerate limit and demand exact equality
    with the classic score on the same mutants and sample stream."""
    cfg.validate()
    put = PutId(put)
    if put.value not in cfg.deterministic_puts:
        raise ConfigIncomplete(f"{put.value} is outside the configured subset")
    mutants = list(syntactic_mutants(put)) + list(extra_mutants)

    ms, killed_classic, equiv_classic, classic_states = classic_ms(
        put, mutants, cfg.k_eq, seed)

    mr_eq = equality_relation(put, cfg, seed)
    engine_cfg = EquivalenceConfig(k_eq=cfg.k_eq, eps_eq=cfg.eps_eq,
                                   replicates=1)
    orig = original(put)
    killed_sem = equiv_sem = 0
    annotations = []
    for rec in mutants:
        mut = rec.program()
        state = classify_mutant(orig, mut, [mr_eq], engine_cfg, seed)
        if state == MutantState.EQUIVALENT:
            equiv_sem += 1
        elif state == MutantState.KILLED:
            killed_sem += 1
            ev = KilledEvidence(
                mutant_id=rec.mutant_id, put=put, mp=MetaPattern.MP_EQ,
                fail_ratio=1.0, killing_windows=(None,),
                killing_methods=("equality",),
                artefact_flag=rec.artefact_flag,
                override_count=len(rec.overrides))
            annotations.append(diagnose(ev, LrcaConfig()))
        else:
            # a non-equivalent syntactic mutant must be killed by equality
            raise MismatchDetected(
                f"{rec.mutant_id} survived the equality relation")
        if state != classic_states[rec.mutant_id]:
            raise MismatchDetected(
                f"{rec.mutant_id}: engine says {state.value}, classic says "
                f"{classic_states[rec.mutant_id].value}")
    try:
        sms = compute_sms(len(mutants), equiv_sem, killed_sem)
    except AllEquivalent:
        sms = None
    if (killed_sem, equiv_sem) != (killed_classic, equiv_classic):
        raise MismatchDetected(
            f"{put.value}: counts differ "
            f"(semantic {killed_sem}/{equiv_sem}, classic "
            f"{killed_classic}/{equiv_classic})")
    if sms != ms:
        raise MismatchDetected(f"{put.value}: score {sms} != classic {ms}")

    histogram = {c.value: 0 for c in RootCause}
    for ann in annotations:
        histogram[ann.root_cause.value] += 1
    suspect = (sum(v for k, v in histogram.items() if k != "C1")
               / max(1, killed_sem))
    return {
        "put": put.value,
        "mutants": len(mutants),
        "killed": killed_sem,
        "equivalent": equiv_sem,
        "sms": sms,
        "classic_ms": ms,
        "exact_equal": sms == ms,
        "label_histogram": histogram,
        "suspect_share": suspect,
        "k_eq": cfg.k_eq,
        "seed": seed,
    }


def check_lrca_trivialisation(reports) -> dict:
    """Every degenerate-limit kill must carry the true-failure label."""
    total_killed = 0
    c1 = 0
    for rep in reports:
        hist = rep["label_histogram"]
        total_killed += rep["killed"]
        c1 += hist.get("C1", 0)
        offending = {k: v for k, v in hist.items() if k != "C1" and v}
        if offending:
            raise TrivialisationViolated(
                f"{rep['put']}: non-C1 labels under the degenerate limit: "
                f"{offending}")
    return {
        "killed": total_killed,
        "c1_labelled": c1,
        "suspect_share": 0.0 if total_killed else 0.0,
        "trivialised": True,
    }
