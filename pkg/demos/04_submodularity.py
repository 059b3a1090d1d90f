"""Which sensor-set scores have diminishing returns?

Samples nested sets A <= B and an extra sensor s and counts the times
f(A+s) - f(A) < f(B+s) - f(B).
Run: python3 demos/04_submodularity.py
"""

# %%
import numpy as np

from obsassign import MeasureContext, MeasureKind, Point2, TargetBelief, check_submodular_monotone, sensors_from_xy

rng = np.random.default_rng(1)
ctx = MeasureContext(TargetBelief(Point2(0.0, 0.0), np.eye(2), 1.0, 1))

for kind in MeasureKind:
    mono = sub = 0
    for _ in range(10):
        universe = sensors_from_xy(rng.uniform(-20, 20, (7, 2)))
        rep = check_submodular_monotone(kind, universe, ctx, 300, rng=rng)
        mono += len(rep.monotone_violations)
        sub += len(rep.submodular_violations)
    print(f"{kind.value:<15} monotone violations {mono:>5}   submodular violations {sub:>5}")

# %% A concrete witness for the regularized trace of the inverse.
universe = sensors_from_xy([(-15.0, 14.1), (12.6, -14.6), (14.7, 0.8), (9.7, -9.3), (-11.4, 13.9)])
rep = check_submodular_monotone("TraceInverse", universe, ctx, 0, exhaustive=True)
v = max(rep.submodular_violations, key=lambda v: v.margin)
print(f"A={v.A} B={v.B} s={v.s}: gain on A {v.lhs:.4f} < gain on B {v.rhs:.4f}")
