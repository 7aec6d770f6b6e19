"""Browse the hand-built mutant pools.

Every mutant is a parameter override of the reference kernel, tagged with
its operator class and semanticity profile, and screened for
executability and non-triviality before pool entry.
"""

import numpy as np

from semscore import OperatorClass, catalog, l0_prescreen, pool
from semscore.mutants import default_probes
from semscore.kernels import PutId

print("pool sizes per program")
for put in PutId:
    records = pool(put)
    by_class = {op.value: sum(1 for r in records if r.operator == op)
                for op in OperatorClass}
    print(f"{put.value}: {len(records):2d} mutants  {by_class}")

print()
print("the acceptance-rule exemplar on the chain sampler")
cap = next(r for r in catalog("B2", OperatorClass.OS)
           if "min(0.95, r)" in r.description)
print(f"  {cap.mutant_id}: {cap.description}")
print(f"  overrides: {dict(cap.overrides)}")
print(f"  flags: boundary={cap.semanticity.crosses_boundary} "
      f"domain={cap.semanticity.domain_knowledge} "
      f"class={cap.semanticity.changes_class}")

orig_vals = cap.program().evaluate(np.array([1.0, 2.0, 3.0]), seed=5)
print(f"  outputs at [1, 2, 3] (seed 5): {np.round(orig_vals, 3)}")

print()
print("prescreen in action (a no-op clone is rejected as trivial)")
clone = type(cap)(mutant_id="B2-NOOP", put=cap.put, operator=cap.operator,
                  kind="semantic", semanticity=cap.semanticity,
                  artefact_flag=False, description="no-op", overrides=())
verdict = l0_prescreen(clone, default_probes("B2"))
print(f"  accepted={verdict.accepted} reason={verdict.reason!r}")
