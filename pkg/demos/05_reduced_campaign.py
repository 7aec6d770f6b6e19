"""A reduced end-to-end campaign with statistics and verdicts.

This trims the output-agreement sample count and the replicate count so
the walkthrough finishes in a couple of minutes; the shipped defaults
(1000 samples, 20 replicates) are what the acceptance gate runs.
"""

from semscore import EquivalenceConfig, run_campaign
from semscore.lrca import LrcaConfig, annotate_campaign
from semscore.reporting import build_stats_report, render_report

cfg = EquivalenceConfig(k_eq=150, replicates=3)
print("running the 12 x 5 x 5 tensor (reduced settings)...")
campaign = run_campaign(cfg, seed=2)
annotate_campaign(campaign, LrcaConfig())

stats = build_stats_report(campaign, seed=2, headline_iterations=1000)
print()
print(render_report(campaign, stats))

avc = stats["aligned_vs_cross"]
print(f"aligned slice n={avc['n_aligned']} mean={avc['aligned_mean']:.3f}; "
      f"cross slice n={avc['n_cross']} mean={avc['cross_mean']:.3f}")
print(f"suspect-share mean: {stats['mean_suspect_share']}")
