"""Result-bundle serialization and the statistics report builder.

Every emitted file echoes the configuration that produced it, numbers are
finite or explicit sentinels, and writes are all-or-nothing so reruns with
the same seed produce byte-identical bundles (timestamps live in a separate
metadata file).
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Optional

import numpy as np

from . import stats as S
from .engine import CampaignResult, CellResult, EquivalenceConfig, PerMutant, \
    MutantState, pattern_coverage
from .errors import ResultsMissing, ZeroMean
from .kernels import PutId, put_class
from .lrca import calibrate, h4_cutoff_sweep
from .mutants import mutant_manifest, OperatorClass
from .relations import CAMPAIGN_PATTERNS, MetaPattern, mr_manifest

CAMPAIGN_FILE = "campaign_results.json"
LRCA_FILE = "lrca_report.json"
STATS_FILE = "stats_report.json"
POWER_FILE = "power_report.json"
DEGENERATION_FILE = "degeneration_report.json"
MUTANT_MANIFEST_FILE = "mutant_manifest.json"
MR_MANIFEST_FILE = "mr_manifest.json"
META_FILE = "run_meta.json"


def _sentinel(value):
    if value is None:
        return "undefined"
    if isinstance(value, float):
        if np.isnan(value):
            return "undefined"
        if np.isinf(value):
            return "infinite"
    return value


def _unsentinel(value):
    if value == "undefined":
        return None
    if value == "infinite":
        return np.inf
    return value


def write_json(path, payload):
    """Atomic, deterministic JSON write."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    body = json.dumps(payload, indent=1, sort_keys=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".part")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(body + "\n")
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def read_json(path):
    if not os.path.exists(path):
        raise ResultsMissing(f"missing result file: {path}")
    with open(path) as fh:
        return json.load(fh)


def config_echo(cfg: EquivalenceConfig, seed: int) -> dict:
    return {
        "seed": seed,
        "k_eq": cfg.k_eq,
        "eps_eq": cfg.eps_eq,
        "equivalence_mode": cfg.mode,
        "replicates": cfg.replicates,
    }


def cell_to_dict(cell: CellResult) -> dict:
    return {
        "put": cell.put.value,
        "mp": cell.mp.value,
        "operator": cell.operator.value if cell.operator else "pooled",
        "inst_count": cell.inst_count,
        "equiv_count": cell.equiv_count,
        "killed_count": cell.killed_count,
        "survive_count": cell.survive_count,
        "sms": _sentinel(cell.sms),
        "inst_rate": cell.inst_rate,
        "equiv_rate": cell.equiv_rate,
        "survive_rate": cell.survive_rate,
        "c1_share": _sentinel(cell.c1_share),
        "suspect_share": _sentinel(cell.suspect_share),
        "aligned": cell.aligned,
        "mr_pass_seen": cell.mr_pass_seen,
        "mr_fail_seen": cell.mr_fail_seen,
        "per_mutant": [
            {
                "mutant_id": pm.mutant_id,
                "operator": pm.operator,
                "state": pm.state.value,
                "fail_ratio": pm.fail_ratio,
                "killed_by": list(pm.killed_by),
                "artefact_flag": pm.artefact_flag,
                "override_count": pm.override_count,
                "root_cause": _sentinel(pm.root_cause),
                "co_occurring": list(pm.co_occurring),
            }
            for pm in cell.per_mutant
        ],
    }


def cell_from_dict(d: dict) -> CellResult:
    per = [PerMutant(
        mutant_id=pm["mutant_id"],
        operator=pm["operator"],
        state=MutantState(pm["state"]),
        fail_ratio=pm["fail_ratio"],
        killed_by=tuple(pm["killed_by"]),
        artefact_flag=pm["artefact_flag"],
        override_count=pm["override_count"],
        root_cause=_unsentinel(pm["root_cause"]),
        co_occurring=tuple(pm["co_occurring"]),
    ) for pm in d["per_mutant"]]
    return CellResult(
        put=PutId(d["put"]),
        mp=MetaPattern(d["mp"]),
        operator=None if d["operator"] == "pooled"
        else OperatorClass(d["operator"]),
        inst_count=d["inst_count"],
        equiv_count=d["equiv_count"],
        killed_count=d["killed_count"],
        survive_count=d["survive_count"],
        sms=_unsentinel(d["sms"]),
        inst_rate=d["inst_rate"],
        equiv_rate=d["equiv_rate"],
        survive_rate=d["survive_rate"],
        per_mutant=per,
        aligned=d["aligned"],
        mr_pass_seen=d["mr_pass_seen"],
        mr_fail_seen=d["mr_fail_seen"],
        c1_share=_unsentinel(d["c1_share"]),
        suspect_share=_unsentinel(d["suspect_share"]),
    )


def campaign_to_payload(campaign: CampaignResult) -> dict:
    defined = [c.sms for c in campaign.matrix if c.sms is not None]
    summary = {
        "cells": len(campaign.matrix),
        "mean_sms": float(np.mean(defined)) if defined else None,
        "median_sms": float(np.median(defined)) if defined else None,
        "std_sms": float(np.std(defined)) if defined else None,
        "zero_sms_cells": int(sum(1 for v in defined if v == 0.0)),
        "undefined_sms_cells": len(campaign.matrix) - len(defined),
        "aligned_cells": sum(1 for c in campaign.matrix if c.aligned),
        "cross_cells": sum(1 for c in campaign.matrix if not c.aligned),
    }
    return {
        "config": config_echo(campaign.config, campaign.seed),
        "summary": {k: _sentinel(v) for k, v in summary.items()},
        "matrix": [cell_to_dict(c) for c in campaign.matrix],
        "tensor": [cell_to_dict(c) for c in campaign.tensor],
    }


def campaign_from_payload(payload: dict) -> CampaignResult:
    cfg = EquivalenceConfig(
        k_eq=payload["config"]["k_eq"],
        eps_eq=payload["config"]["eps_eq"],
        mode=payload["config"]["equivalence_mode"],
        replicates=payload["config"]["replicates"],
    )
    return CampaignResult(
        tensor=[cell_from_dict(d) for d in payload["tensor"]],
        matrix=[cell_from_dict(d) for d in payload["matrix"]],
        config=cfg,
        seed=payload["config"]["seed"],
    )


def load_campaign(directory) -> CampaignResult:
    return campaign_from_payload(
        read_json(os.path.join(directory, CAMPAIGN_FILE)))


# ---------------------------------------------------------------------------
# statistics report

def class_of(cell: CellResult) -> str:
    return put_class(cell.put).value


def sms_samples(campaign: CampaignResult):
    aligned = [c.sms for c in campaign.matrix if c.aligned and c.sms is not None]
    cross = [c.sms for c in campaign.matrix
             if not c.aligned and c.sms is not None]
    return np.asarray(aligned), np.asarray(cross)


def coverage_by_put(campaign: CampaignResult) -> dict:
    out = {}
    for put in PutId:
        cells = [c for c in campaign.matrix if c.put == put]
        out[put.value] = pattern_coverage(cells)
    return out


def build_stats_report(campaign: CampaignResult, seed: int = 0,
                       bootstrap_iterations: int = 1000,
                       headline_iterations: int = 10000) -> dict:
    aligned, cross = sms_samples(campaign)
    delta = S.cliffs_delta(aligned, cross)
    ci = S.bootstrap_ci(aligned, cross, headline_iterations, seed)
    nonzero_or, median_ratio = S.odds_ratios(aligned, cross)

    class_rows = {}
    class_deltas = []
    for cls in "ABCD":
        cells = [c for c in campaign.matrix
                 if class_of(c) == cls and c.sms is not None]
        a = [c.sms for c in cells if c.aligned]
        x = [c.sms for c in cells if not c.aligned]
        d = float(np.mean(a) - np.mean(x)) if a and x else None
        class_rows[cls] = {
            "mean_sms": float(np.mean([c.sms for c in cells])) if cells
            else None,
            "aligned_mean": float(np.mean(a)) if a else None,
            "cross_mean": float(np.mean(x)) if x else None,
            "delta_sms": d,
        }
        if d is not None:
            class_deltas.append(d)
    positives, total, sign_p = S.sign_test(class_deltas)
    try:
        cv = S.coefficient_of_variation(class_deltas)
    except ZeroMean:
        cv = None

    matrix_rows = []
    complete = True
    for put in PutId:
        row = []
        for mp in CAMPAIGN_PATTERNS:
            cell = next(c for c in campaign.matrix
                        if c.put == put and c.mp == mp)
            if cell.sms is None:
                complete = False
            row.append(cell.sms if cell.sms is not None else 0.0)
        matrix_rows.append(row)
    chi2, fried_p, kendall_w, rank_means = S.friedman(matrix_rows)

    per_class_friedman = {}
    raw_class_ps = []
    for cls in "ABCD":
        rows = [matrix_rows[i] for i, put in enumerate(PutId)
                if put.value[0] == cls]
        c2, p, w, _ = S.friedman(rows)
        per_class_friedman[cls] = {"chi2": c2, "p_raw": p, "kendalls_w": w}
        raw_class_ps.append(p)
    adj = S.bonferroni(raw_class_ps, 4)
    for cls, p_adj in zip("ABCD", adj):
        per_class_friedman[cls]["p_bonferroni"] = p_adj

    coverage = coverage_by_put(campaign)
    put_mean_sms = [float(np.mean([v for v in row])) for row in matrix_rows]
    rho, tau, p_rho, p_tau = S.spearman_kendall(
        put_mean_sms, [coverage[p.value] for p in PutId], seed=seed)

    family = {
        "friedman_overall": fried_p,
        "sign_test": sign_p,
        "spearman": p_rho,
        "kendall": p_tau,
    }
    rejected = S.bh_fdr(list(family.values()), alpha=0.05)
    fdr = {name: bool(flag) for name, flag in zip(family, rejected)}

    stats_for_verdicts = {
        "delta": delta,
        "nonzero_odds_ratio": nonzero_or,
        "sign_test": (positives, total, sign_p),
        "cv_delta_sms": cv,
    }
    verdicts = S.evaluate_hypotheses(campaign, stats_for_verdicts)

    suspect = [c.suspect_share for c in campaign.matrix
               if c.suspect_share is not None]
    return {
        "config": config_echo(campaign.config, campaign.seed),
        "stats_seed": seed,
        "bootstrap_iterations": bootstrap_iterations,
        "headline_iterations": headline_iterations,
        "cells": len(campaign.matrix),
        "aligned_vs_cross": {
            "n_aligned": int(aligned.size),
            "n_cross": int(cross.size),
            "aligned_mean": float(aligned.mean()) if aligned.size else None,
            "cross_mean": float(cross.mean()) if cross.size else None,
            "aligned_median": float(np.median(aligned)) if aligned.size
            else None,
            "cross_median": float(np.median(cross)) if cross.size else None,
            "delta": delta,
            "delta_ci_low": ci[0],
            "delta_ci_high": ci[1],
            "classification": S.romano_classify(delta),
            "nonzero_odds_ratio": _sentinel(nonzero_or),
            "median_odds_ratio": _sentinel(median_ratio),
        },
        "per_class": class_rows,
        "sign_test": {"positives": positives, "total": total, "p": sign_p},
        "cv_delta_sms": _sentinel(cv),
        "friedman": {
            "chi2": chi2, "p": fried_p, "kendalls_w": kendall_w,
            "rank_means": rank_means,
            "rows_complete": complete,
        },
        "per_class_friedman": per_class_friedman,
        "pattern_coverage": coverage,
        "sms_vs_coverage": {"spearman_rho": rho, "p_rho": p_rho,
                            "kendall_tau": tau, "p_tau": p_tau},
        "bh_fdr_rejections": fdr,
        "mean_suspect_share": _sentinel(
            float(np.mean(suspect)) if suspect else None),
        "hypotheses": {
            "h1": verdicts.h1, "h2": verdicts.h2,
            "h3": verdicts.h3, "h4": verdicts.h4,
            "support": {k: _sentinel(v) if not isinstance(v, dict) else v
                        for k, v in verdicts.support.items()},
        },
    }


def build_lrca_report(campaign: CampaignResult,
                      cutoffs=tuple(np.round(np.arange(0.05, 0.51, 0.05), 2))
                      ) -> dict:
    per_cell = []
    labels = []
    for cell in campaign.matrix:
        per_cell.append({
            "put": cell.put.value,
            "mp": cell.mp.value,
            "c1_share": _sentinel(cell.c1_share),
            "suspect_share": _sentinel(cell.suspect_share),
            "killed_count": cell.killed_count,
        })
        for pm in cell.per_mutant:
            if pm.state == MutantState.KILLED:
                labels.append({
                    "put": cell.put.value,
                    "mp": cell.mp.value,
                    "mutant_id": pm.mutant_id,
                    "fail_ratio": pm.fail_ratio,
                    "root_cause": pm.root_cause,
                    "co_occurring": list(pm.co_occurring),
                })
    return {
        "config": config_echo(campaign.config, campaign.seed),
        "per_cell": per_cell,
        "kill_labels": labels,
        "calibration": calibrate(campaign),
        "h4_cutoff_sweep": h4_cutoff_sweep(campaign, list(cutoffs)),
    }


# ---------------------------------------------------------------------------
# human-readable rendering

def render_report(campaign: CampaignResult, stats: dict) -> str:
    lines = []
    lines.append("pooled score heatmap (rows: programs, columns: patterns)")
    header = "      " + "".join(f"{mp.value:>8}" for mp in CAMPAIGN_PATTERNS)
    lines.append(header)
    for put in PutId:
        row = [f"{put.value:>4}  "]
        for mp in CAMPAIGN_PATTERNS:
            cell = next(c for c in campaign.matrix
                        if c.put == put and c.mp == mp)
            row.append("   undef" if cell.sms is None
                       else f"{cell.sms:8.3f}")
        lines.append("".join(row))
    lines.append("")
    lines.append("class marginals (mean pooled score)")

    def fmt(v):
        return "undef" if v is None else f"{v:.3f}"

    for cls, row in stats["per_class"].items():
        lines.append(f"  {cls}: mean={fmt(row['mean_sms'])} "
                     f"aligned={fmt(row['aligned_mean'])} "
                     f"cross={fmt(row['cross_mean'])}")
    avc = stats["aligned_vs_cross"]
    lines.append("")
    lines.append(f"aligned vs cross: delta={fmt(avc['delta'])} "
                 f"[{fmt(avc['delta_ci_low'])}, {fmt(avc['delta_ci_high'])}] "
                 f"({avc['classification']})")
    lines.append(f"nonzero odds ratio: {avc['nonzero_odds_ratio']}; "
                 f"median ratio: {avc['median_odds_ratio']}")
    lines.append("")
    lines.append("hypothesis verdicts")
    for h in ("h1", "h2", "h3", "h4"):
        lines.append(f"  {h.upper()}: {stats['hypotheses'][h]}")
    lines.append("")
    lines.append("pattern coverage per program")
    for put, pc in stats["pattern_coverage"].items():
        lines.append(f"  {put}: {pc:.1f}" if pc in (0.0, 1.0)
                     else f"  {put}: {pc:.2f}")
    return "\n".join(lines) + "\n"


def render_heatmap_csv(campaign: CampaignResult) -> str:
    rows = ["put," + ",".join(mp.value for mp in CAMPAIGN_PATTERNS)]
    for put in PutId:
        vals = []
        for mp in CAMPAIGN_PATTERNS:
            cell = next(c for c in campaign.matrix
                        if c.put == put and c.mp == mp)
            vals.append("undefined" if cell.sms is None else f"{cell.sms:.6f}")
        rows.append(put.value + "," + ",".join(vals))
    return "\n".join(rows) + "\n"


def write_bundle(directory, campaign: CampaignResult, lrca_report: dict,
                 stats_report: dict, meta: Optional[dict] = None):
    os.makedirs(directory, exist_ok=True)
    write_json(os.path.join(directory, CAMPAIGN_FILE),
               campaign_to_payload(campaign))
    write_json(os.path.join(directory, LRCA_FILE), lrca_report)
    write_json(os.path.join(directory, STATS_FILE), stats_report)
    write_json(os.path.join(directory, MUTANT_MANIFEST_FILE),
               {"config": config_echo(campaign.config, campaign.seed),
                "mutants": mutant_manifest()})
    write_json(os.path.join(directory, MR_MANIFEST_FILE),
               {"config": config_echo(campaign.config, campaign.seed),
                "relations": mr_manifest()})
    if meta is not None:
        write_json(os.path.join(directory, META_FILE), meta)
