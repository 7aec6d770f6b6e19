"""Likely-root-cause attribution over killed mutants.

Three diagnostic layers plus an artefact recheck annotate every kill with
one of five causes; multiple recorded causes resolve by fixed priority.
The annotation never alters counts or scores.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from .errors import MissingEvidence, NoKills
from .kernels import PutClass, PutId, original, put_class
from .relations import MetaPattern, mrs_for
from .rng import substream_seed


class RootCause(str, Enum):
    C1 = "C1"  # true semantic failure
    C2 = "C2"  # numerical-tolerance perturbation
    C3 = "C3"  # out-of-distribution trip
    C4 = "C4"  # statistical-assumption violation
    C5 = "C5"  # mutator artefact


# resolution order for multi-label kills
PRIORITY = [RootCause.C5, RootCause.C4, RootCause.C3, RootCause.C2,
            RootCause.C1]


@dataclass(frozen=True)
class LrcaConfig:
    fail_ratio_cutoff: float = 0.80
    ood_band: float = 0.05
    tolerance_multiplier: float = 3.0
    replicates: int = 20
    over_injection_params: int = 3  # more distinct overrides flags C5

    def __post_init__(self):
        if not 0.0 < self.fail_ratio_cutoff <= 1.0:
            raise ValueError("fail-ratio cutoff must be in (0, 1]")


@dataclass(frozen=True)
class KilledEvidence:
    mutant_id: str
    put: PutId
    mp: MetaPattern
    fail_ratio: float
    killing_windows: Tuple[Optional[Tuple[float, float]], ...]
    killing_methods: Tuple[str, ...]  # wilcoxon | dtw | equality | order
    artefact_flag: bool
    override_count: int


@dataclass(frozen=True)
class LrcaAnnotation:
    mutant_id: str
    root_cause: RootCause
    co_occurring: Tuple[RootCause, ...]
    evidence: str


_METHOD_BY_MP = {
    MetaPattern.MP1: "equality",
    MetaPattern.MP2: "wilcoxon",
    MetaPattern.MP3: "order",
    MetaPattern.MP4: "dtw",
    MetaPattern.MP5: "wilcoxon",
    MetaPattern.MP_EQ: "equality",
}


def evidence_for(cell, per_mutant) -> KilledEvidence:
    """Assemble diagnosis evidence for one killed mutant of a cell."""
    by_id = {mr.mr_id: mr for mr in mrs_for(cell.put, cell.mp)}
    windows = []
    methods = []
    for mr_id in per_mutant.killed_by:
        mr = by_id[mr_id]
        windows.append(mr.source_window)
        methods.append(_METHOD_BY_MP[mr.mp])
    return KilledEvidence(
        mutant_id=per_mutant.mutant_id,
        put=cell.put,
        mp=cell.mp,
        fail_ratio=per_mutant.fail_ratio,
        killing_windows=tuple(windows),
        killing_methods=tuple(methods),
        artefact_flag=per_mutant.artefact_flag,
        override_count=per_mutant.override_count,
    )


def _ood_regions(put: PutId, band: float):
    lo, hi = original(put).descriptor().input_domain
    width = hi - lo
    return (lo, lo + band * width), (hi - band * width, hi)


def _confined_to_ood(put: PutId, band: float,
                     windows: Sequence[Optional[Tuple[float, float]]]) -> bool:
    """All killing relations sampled only inside the outer domain bands."""
    if not windows:
        return False
    low_band, high_band = _ood_regions(put, band)
    for window in windows:
        if window is None:
            return False
        wl, wh = window
        inside_low = low_band[0] <= wl and wh <= low_band[1]
        inside_high = high_band[0] <= wl and wh <= high_band[1]
        if not (inside_low or inside_high):
            return False
    return True


_ASSUMPTION_CACHE: Dict = {}


def _rank_autocorr(values: np.ndarray) -> float:
    from .stats import _midranks
    ranks = _midranks(np.asarray(values, dtype=np.float64))
    a, b = ranks[:-1], ranks[1:]
    if a.std() == 0 or b.std() == 0:
        return 0.0  # constant samples carry no serial structure
    return float(np.corrcoef(a, b)[0, 1])


def _assumption_violated(put: PutId, method: str, multiplier: float) -> bool:
    """Pre-check the statistical baseline of the verification method on the
    unmutated program: serial correlation for rank tests, mean drift for
    warping comparisons."""
    key = (put, method, multiplier)
    if key in _ASSUMPTION_CACHE:
        return _ASSUMPTION_CACHE[key]
    prog = original(put)
    lo, hi = prog.descriptor().input_domain
    x = 0.5 * (lo + hi)
    if method == "wilcoxon":
        reps = np.array([prog.evaluate(x, seed=substream_seed("lrca-iid", r))
                         for r in range(24)])
        violated = abs(_rank_autocorr(reps)) > 0.5
    elif method == "dtw":
        if prog.descriptor().trajectory_capable:
            trajs = np.stack([
                prog.trajectory(x, seed=substream_seed("lrca-stat", r), steps=16)
                for r in range(8)])
            drift = abs(trajs.mean(axis=1)[-4:].mean()
                        - trajs.mean(axis=1)[:4].mean())
            spread = trajs.mean(axis=1).std() + 1e-12
            violated = drift > multiplier * spread
        else:
            violated = False
    else:
        violated = False
    _ASSUMPTION_CACHE[key] = violated
    return violated


def diagnose(evidence: KilledEvidence, cfg: LrcaConfig) -> LrcaAnnotation:
    """Record every triggered cause; resolve the label by priority."""
    if evidence.fail_ratio <= 0.0:
        raise MissingEvidence(f"{evidence.mutant_id} carries no kill evidence")
    causes: Set[RootCause] = set()
    notes: List[str] = []

    # L1 tolerance robustness (all classes)
    if evidence.fail_ratio < cfg.fail_ratio_cutoff:
        causes.add(RootCause.C2)
        notes.append(f"fail ratio {evidence.fail_ratio:.2f} below "
                     f"{cfg.fail_ratio_cutoff:.2f}")

    # L2 out-of-distribution triage (surrogate and ML classes only)
    if put_class(evidence.put) in (PutClass.SURROGATE, PutClass.ML):
        if _confined_to_ood(evidence.put, cfg.ood_band,
                            evidence.killing_windows):
            causes.add(RootCause.C3)
            notes.append(f"failures confined to the outer {cfg.ood_band:.0%} "
                         "band")

    # L3 statistical-assumption baseline (probabilistic/ML with rank or
    # warping verdicts only)
    if put_class(evidence.put) in (PutClass.PROBABILISTIC, PutClass.ML):
        for method in set(evidence.killing_methods) & {"wilcoxon", "dtw"}:
            if _assumption_violated(evidence.put, method,
                                    cfg.tolerance_multiplier):
                causes.add(RootCause.C4)
                notes.append(f"{method} baseline assumption violated")

    # artefact recheck
    if evidence.artefact_flag:
        causes.add(RootCause.C5)
        notes.append("authored artefact flag")
    elif evidence.override_count > cfg.over_injection_params:
        causes.add(RootCause.C5)
        notes.append(f"over-injection: {evidence.override_count} parameters")

    label = next(c for c in PRIORITY if c in causes or c == RootCause.C1)
    return LrcaAnnotation(
        mutant_id=evidence.mutant_id,
        root_cause=label,
        co_occurring=tuple(c for c in PRIORITY if c in causes),
        evidence="; ".join(notes) if notes else "no non-semantic cause",
    )


def shares(cell) -> Tuple[float, float]:
    """(C1 share, suspect share) over a cell's killed mutants."""
    killed = [pm for pm in cell.per_mutant if pm.state.value == "killed"]
    if not killed:
        raise NoKills(f"cell {cell.put.value}/{cell.mp.value} killed nothing")
    if any(pm.root_cause is None for pm in killed):
        raise MissingEvidence("cell has unannotated kills")
    c1 = sum(1 for pm in killed if pm.root_cause == RootCause.C1.value)
    c1_share = c1 / len(killed)
    return c1_share, 1.0 - c1_share


def annotate_campaign(campaign, cfg: LrcaConfig):
    """Label every kill in place; counts and scores stay untouched."""
    for cell in list(campaign.tensor) + list(campaign.matrix):
        for pm in cell.per_mutant:
            if pm.state.value != "killed":
                continue
            ann = diagnose(evidence_for(cell, pm), cfg)
            pm.root_cause = ann.root_cause.value
            pm.co_occurring = tuple(c.value for c in ann.co_occurring)
        try:
            cell.c1_share, cell.suspect_share = shares(cell)
        except NoKills:
            cell.c1_share, cell.suspect_share = None, None
    return campaign


GRID_OOD_BANDS = (0.02, 0.05, 0.10)
GRID_MULTIPLIERS = (3.0, 10.0, 30.0)


def calibrate(campaign, bands=GRID_OOD_BANDS,
              multipliers=GRID_MULTIPLIERS, h4_cutoff=0.20):
    """Sweep the 9-point threshold grid; report shares per combination."""
    entries = []
    for band in bands:
        for mult in multipliers:
            cfg = LrcaConfig(ood_band=band, tolerance_multiplier=mult)
            shares_list = []
            passing = 0
            defined = 0
            for cell in campaign.matrix:
                killed = [pm for pm in cell.per_mutant
                          if pm.state.value == "killed"]
                if not killed:
                    continue
                c1 = sum(
                    1 for pm in killed
                    if diagnose(evidence_for(cell, pm), cfg).root_cause
                    == RootCause.C1)
                share = c1 / len(killed)
                shares_list.append(share)
                defined += 1
                if 1.0 - share <= h4_cutoff:
                    passing += 1
            entries.append({
                "ood_band": band,
                "tolerance_multiplier": mult,
                "mean_c1_share": float(np.mean(shares_list)) if shares_list
                else None,
                "cells_with_low_suspect": passing,
                "cells_with_kills": defined,
            })
    best = max(entries, key=lambda e: (e["cells_with_low_suspect"],
                                       e["mean_c1_share"] or 0.0))
    for e in entries:
        e["best"] = e is best
    return {
        "grid": entries,
        "best_combination": {"ood_band": best["ood_band"],
                             "tolerance_multiplier":
                                 best["tolerance_multiplier"]},
        "reported_primary": {"ood_band": 0.02, "tolerance_multiplier": 3.0},
    }


def h4_cutoff_sweep(campaign, cutoffs) -> List[dict]:
    """Cells meeting a suspect-share bound, per candidate cutoff."""
    if len(list(cutoffs)) == 0:
        raise ValueError("cutoffs must be nonempty")
    rows = []
    defined = [c for c in campaign.matrix if c.suspect_share is not None]
    for cutoff in cutoffs:
        passing = sum(1 for c in defined if c.suspect_share <= cutoff)
        rows.append({
            "cutoff": float(cutoff),
            "cells_pass": passing,
            "cells_defined": len(defined),
            "ratio": passing / len(defined) if defined else 0.0,
        })
    return rows
