"""Command surface: run campaigns, recompute statistics, power analysis,
degeneration checks, and plain-text reporting.

Exit codes: 0 success, 2 invalid configuration, 3 missing inputs,
4 degeneration mismatch.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .degeneration import (
    DegenerateLimitConfig,
    check_degeneration,
    check_lrca_trivialisation,
)
from .engine import EquivalenceConfig, run_campaign
from .errors import (
    ConfigIncomplete,
    ConfigInvalid,
    MismatchDetected,
    ResultsMissing,
    TrivialisationViolated,
    UnreachableTarget,
)
from .lrca import LrcaConfig, annotate_campaign
from .reporting import (
    DEGENERATION_FILE,
    POWER_FILE,
    STATS_FILE,
    build_lrca_report,
    build_stats_report,
    load_campaign,
    render_heatmap_csv,
    render_report,
    sms_samples,
    write_bundle,
    write_json,
    read_json,
)
from .stats import power_plugin, power_stipulated

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_MISSING = 3
EXIT_MISMATCH = 4

_MODES = {"e1e2": "E1_and_E2", "e1": "E1_only", "e2": "E2_only"}


def _load_config_file(path) -> dict:
    if path is None:
        return {}
    if not os.path.exists(path):
        raise ConfigInvalid(f"config file not found: {path}")
    with open(path) as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config file is not valid JSON: {exc}")


def _campaign_config(args) -> tuple:
    file_cfg = _load_config_file(getattr(args, "config", None))
    seed = args.seed if args.seed is not None else file_cfg.get("seed", 0)
    k_eq = args.keq if args.keq is not None else file_cfg.get("k_eq", 1000)
    replicates = (args.replicates if args.replicates is not None
                  else file_cfg.get("replicates", 20))
    mode_flag = args.mode if args.mode is not None \
        else file_cfg.get("equivalence_mode", "e1e2")
    eps_eq = file_cfg.get("eps_eq", 1e-6)
    if mode_flag in _MODES:
        mode = _MODES[mode_flag]
    elif mode_flag in _MODES.values():
        mode = mode_flag
    else:
        raise ConfigInvalid(f"unknown equivalence mode {mode_flag!r}")
    lrca_cfg = file_cfg.get("lrca", {})
    try:
        eng = EquivalenceConfig(k_eq=k_eq, eps_eq=eps_eq, mode=mode,
                                replicates=replicates)
        lrca = LrcaConfig(
            fail_ratio_cutoff=lrca_cfg.get("fail_ratio_cutoff", 0.80),
            ood_band=lrca_cfg.get("ood_band", 0.05),
            tolerance_multiplier=lrca_cfg.get("tolerance_multiplier", 3.0),
        )
    except ValueError as exc:
        raise ConfigInvalid(str(exc))
    bootstrap = file_cfg.get("bootstrap_iterations", 1000)
    headline = file_cfg.get("headline_bootstrap_iterations", 10000)
    return eng, lrca, seed, bootstrap, headline


def cmd_run(args) -> int:
    try:
        eng, lrca, seed, bootstrap, headline = _campaign_config(args)
    except ConfigInvalid as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out
    started = time.time()
    campaign = run_campaign(eng, seed, workers=args.workers)
    annotate_campaign(campaign, lrca)
    stats_report = build_stats_report(campaign, seed=seed,
                                      bootstrap_iterations=bootstrap,
                                      headline_iterations=headline)
    lrca_report = build_lrca_report(campaign)
    meta = {
        "tool": "semscore",
        "version": __version__,
        "started_unix": started,
        "elapsed_seconds": time.time() - started,
        "workers": args.workers,
    }
    write_bundle(out, campaign, lrca_report, stats_report, meta)
    print(f"campaign written to {out} "
          f"({len(campaign.matrix)} pooled cells, "
          f"{len(campaign.tensor)} tensor cells)")
    return EXIT_OK


def cmd_stats(args) -> int:
    try:
        campaign = load_campaign(args.indir)
    except ResultsMissing as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MISSING
    report = build_stats_report(campaign, seed=campaign.seed)
    write_json(os.path.join(args.indir, STATS_FILE), report)
    print(f"statistics recomputed into {args.indir}/{STATS_FILE}")
    return EXIT_OK


def cmd_power(args) -> int:
    try:
        campaign = load_campaign(args.indir)
    except ResultsMissing as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MISSING
    aligned, cross = sms_samples(campaign)
    if args.mode == "plugin":
        rep = power_plugin(aligned, cross, n_sim=args.nsim, seed=args.seed)
        payload = {
            "mode": rep.mode,
            "n_sim": rep.n_sim,
            "thresholds": [
                {"threshold": t, "power": p}
                for t, p in rep.thresholds_and_powers],
        }
    else:
        try:
            rep = power_stipulated(aligned, cross, args.target,
                                   n_sim=args.nsim, seed=args.seed)
        except UnreachableTarget as exc:
            print(f"unreachable target: {exc}", file=sys.stderr)
            return EXIT_CONFIG
        payload = {
            "mode": rep.mode,
            "n_sim": rep.n_sim,
            "target": args.target,
            "mixture_weight": rep.mixture_weight,
            "realized_expected_delta": rep.realized_expected_delta,
            "point_estimate_power": rep.thresholds_and_powers[0][1],
            "ci_positive_power": rep.ci_positive_power,
        }
    payload["config"] = {"seed": args.seed, "n_sim": args.nsim,
                         "campaign_seed": campaign.seed}
    write_json(os.path.join(args.indir, POWER_FILE), payload)
    print(f"power report written to {args.indir}/{POWER_FILE}")
    return EXIT_OK


def cmd_degenerate_check(args) -> int:
    cfg = DegenerateLimitConfig(k_eq=args.keq)
    try:
        cfg.validate()
    except ConfigIncomplete as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    reports = []
    try:
        for put in cfg.deterministic_puts:
            rep = check_degeneration(put, cfg, seed=args.seed)
            reports.append(rep)
            print(f"{put}: score={rep['sms']} classic={rep['classic_ms']} "
                  f"exact={rep['exact_equal']}")
        trivial = check_lrca_trivialisation(reports)
    except (MismatchDetected, TrivialisationViolated) as exc:
        print(f"degeneration mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    payload = {
        "config": {"seed": args.seed, "k_eq": cfg.k_eq},
        "per_put": reports,
        "trivialisation": trivial,
    }
    if args.out:
        write_json(os.path.join(args.out, DEGENERATION_FILE), payload)
        print(f"degeneration report written to {args.out}/{DEGENERATION_FILE}")
    return EXIT_OK


def cmd_report(args) -> int:
    try:
        campaign = load_campaign(args.indir)
        stats = read_json(os.path.join(args.indir, STATS_FILE))
    except ResultsMissing as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_MISSING
    sys.stdout.write(render_report(campaign, stats))
    if args.csv:
        path = os.path.join(args.indir, "heatmap.csv")
        with open(path, "w") as fh:
            fh.write(render_heatmap_csv(campaign))
        print(f"heatmap csv written to {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="semscore",
        description="semantic-mutation adequacy scoring for metamorphic "
                    "relation suites")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a full campaign")
    run.add_argument("--config", default=None, help="JSON config file")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--keq", type=int, default=None)
    run.add_argument("--replicates", type=int, default=None)
    run.add_argument("--mode", choices=sorted(_MODES), default=None)
    run.add_argument("--out", default="results")
    run.add_argument("--workers", type=int, default=1)
    run.set_defaults(fn=cmd_run)

    stats = sub.add_parser("stats", help="recompute statistics for a bundle")
    stats.add_argument("--in", dest="indir", required=True)
    stats.set_defaults(fn=cmd_stats)

    power = sub.add_parser("power", help="power analysis over a bundle")
    power.add_argument("--in", dest="indir", required=True)
    power.add_argument("--mode", choices=["plugin", "stipulated"],
                       default="plugin")
    power.add_argument("--target", type=float, default=0.474)
    power.add_argument("--nsim", type=int, default=2000)
    power.add_argument("--seed", type=int, default=42)
    power.set_defaults(fn=cmd_power)

    degen = sub.add_parser("degenerate-check",
                           help="verify the classic-score degeneration")
    degen.add_argument("--seed", type=int, default=0)
    degen.add_argument("--keq", type=int, default=100_000)
    degen.add_argument("--out", default=None)
    degen.set_defaults(fn=cmd_degenerate_check)

    report = sub.add_parser("report", help="render a bundle as text")
    report.add_argument("--in", dest="indir", required=True)
    report.add_argument("--csv", action="store_true")
    report.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
