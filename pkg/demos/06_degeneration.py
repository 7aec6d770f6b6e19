"""The degenerate-limit consistency check.

With zero tolerances, a long shared sample stream, the bare equality
pattern, rule-based syntactic variants, and the deterministic numeric
programs, the semantic score must equal the classic mutation score
exactly and every kill must attribute to a true failure.
"""

from semscore.degeneration import (
    DegenerateLimitConfig,
    check_degeneration,
    check_lrca_trivialisation,
)
from semscore.errors import ConfigIncomplete

cfg = DegenerateLimitConfig(k_eq=20_000)  # the gate runs 100k
reports = []
for put in ("A1", "A2", "A3"):
    rep = check_degeneration(put, cfg, seed=0)
    reports.append(rep)
    print(f"{put}: semantic={rep['sms']} classic={rep['classic_ms']} "
          f"exact={rep['exact_equal']} labels={rep['label_histogram']}")

summary = check_lrca_trivialisation(reports)
print(f"trivialisation: {summary}")

print()
print("partial limits are rejected outright:")
try:
    DegenerateLimitConfig(eps_eq=1e-6).validate()
except ConfigIncomplete as exc:
    print(f"  ConfigIncomplete: {exc}")
