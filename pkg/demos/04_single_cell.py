"""Adjudicate one (program, pattern, operator) cell.

The engine first screens mutants for equivalence (cheap output agreement,
then verdict coherence), then drives the relation set across replicates;
a kill in any replicate kills the mutant and the replicate fail ratio
feeds root-cause attribution.
"""

from semscore import EquivalenceConfig, run_cell
from semscore.lrca import LrcaConfig, diagnose, evidence_for

cfg = EquivalenceConfig(k_eq=500, replicates=10)
cell = run_cell("A2", "MP5", "SI", cfg, seed=1)

print(f"cell {cell.put.value}/{cell.mp.value}/{cell.operator.value}")
print(f"  instantiated {cell.inst_count}, equivalent {cell.equiv_count}, "
      f"killed {cell.killed_count}, surviving {cell.survive_count}")
print(f"  score: {cell.sms}")
print()
print("per-mutant outcomes")
for pm in cell.per_mutant:
    line = f"  {pm.mutant_id:10s} {pm.state.value:9s} fail_ratio={pm.fail_ratio:.2f}"
    if pm.killed_by:
        line += f"  killed by {', '.join(pm.killed_by)}"
    print(line)

print()
print("root-cause attribution for the kills")
lrca = LrcaConfig()
for pm in cell.per_mutant:
    if pm.state.value != "killed":
        continue
    ann = diagnose(evidence_for(cell, pm), lrca)
    print(f"  {pm.mutant_id}: {ann.root_cause.value} ({ann.evidence})")
