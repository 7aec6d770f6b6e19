"""Tour of the twelve programs under test.

Each kernel is a deterministic (seeded) scalar map with an explicit input
domain; five of them also expose a trajectory, and most expose a
refinement axis used by the convergence relations.
"""

import numpy as np

from semscore import evaluate_put, evaluate_trajectory, list_puts, original

print("program catalogue")
print("-" * 72)
for desc in list_puts():
    lo, hi = desc.input_domain
    x = 0.5 * (lo + hi) + 0.1
    value = evaluate_put(desc.id, x, seed=1)
    tags = []
    if desc.stochastic:
        tags.append("stochastic")
    if desc.trajectory_capable:
        tags.append("trajectory")
    if desc.refinable:
        tags.append("refinable")
    print(f"{desc.id.value}  {desc.name:28s} {desc.mathematical_structure:18s}"
          f" f({x:+.2f}) = {value:+.4f}  [{', '.join(tags) or 'scalar'}]")

print()
print("trajectories (first/last of 12 checkpoints)")
for put in ("A1", "A3", "B2", "C3", "D1"):
    traj = evaluate_trajectory(put, 0.4, seed=3, steps=12)
    print(f"{put}: start {traj[0]:+.4f} -> end {traj[-1]:+.4f}")

print()
print("refinement (A1 integration-step halving against a fine reference)")
prog = original("A1")
xs = np.array([0.6, 1.1])
ref = prog.refined(4).evaluate(xs)
for level in range(3):
    err = np.abs(prog.refined(level).evaluate(xs) - ref).max()
    print(f"  level {level}: max error {err:.3e}")
