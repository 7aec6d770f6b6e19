"""Metamorphic relations and their verdicts.

The catalogue pins one relation set per (program, pattern) cell following
the 30/24/6 density matrix. Verdicts dispatch per pattern: tolerance
equality, signed-rank, convergence order, or warping distance.
"""

from semscore import avp_verify, density, mrs_for, original, primary_mp
from semscore.kernels import PutId
from semscore.mutants import OperatorClass, catalog
from semscore.relations import CAMPAIGN_PATTERNS

print("density matrix (** substantial, * moderate, . vacant)")
header = "     " + "".join(f"{mp.value:>6}" for mp in CAMPAIGN_PATTERNS)
print(header)
marks = {"substantial": "**", "moderate": "*", "vacant": "."}
for put in PutId:
    row = [f"{put.value:>4} "]
    for mp in CAMPAIGN_PATTERNS:
        row.append(f"{marks[density(put, mp).value]:>6}")
    star = primary_mp(put).value
    print("".join(row) + f"   primary: {star}")

print()
print("verdicts for the mirror-symmetry relation on the chaotic integrator")
mr = mrs_for("A1", "MP1")[0]
print(f"  {mr.mr_id}: {mr.description}")
orig = original("A1")
print(f"  original:  {avp_verify(orig, mr, seed=0).verdict}")
swap = next(r for r in catalog("A1", OperatorClass.TF)
            if "y/z swap" in r.description)
drift = next(r for r in catalog("A1", OperatorClass.CE)
             if "0.4" in r.description)
print(f"  drift fault:  {avp_verify(drift.program(), mr, seed=0).verdict} "
      f"(symmetry broken)")

print()
print("trajectory relation vs the observable swap")
mr4 = mrs_for("A1", "MP4")[2]
print(f"  {mr4.mr_id}: {mr4.description}")
print(f"  original: {avp_verify(orig, mr4, seed=0).verdict}")
print(f"  y/z swap: {avp_verify(swap.program(), mr4, seed=0).verdict}")
