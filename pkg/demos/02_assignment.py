"""Greedy pair assignment against the exact optimum and the relaxed upper bound.

Run: python3 demos/02_assignment.py
"""

# %%
import numpy as np

from obsassign import (
    MeasureContext,
    Point2,
    TargetBelief,
    brute_force_unique_pairs,
    evaluate,
    greedy_general,
    greedy_unique_pairs,
    pair_bound_weight,
    relaxed_pair_assignment,
    sensors_from_xy,
)

rng = np.random.default_rng(0)
wf = pair_bound_weight()

# %% Six sensors, three targets in a 100 m square.
sensors = sensors_from_xy(rng.uniform(0, 100, (6, 2)))
targets = [TargetBelief(Point2(*xy), np.eye(2), 1.0, k + 1) for k, xy in enumerate(rng.uniform(0, 100, (3, 2)))]

greedy = greedy_unique_pairs(sensors, targets, wf)
exact = brute_force_unique_pairs(sensors, targets, wf)
relaxed = relaxed_pair_assignment(sensors, targets, wf)
for name, res in (("greedy", greedy), ("exact", exact), ("relaxed", relaxed)):
    print(f"{name:>8}: total {res.total_value:.4f}  pairs {res.by_target()}")
print("greedy / exact =", round(greedy.total_value / exact.total_value, 3))

# %% Bundles: every sensor goes to some target, scored with log det.
sensors = sensors_from_xy(rng.uniform(0, 100, (20, 2)))
targets = [TargetBelief(Point2(*xy), np.eye(2), 1.0, k + 1) for k, xy in enumerate(rng.uniform(0, 100, (5, 2)))]
bundles = greedy_general(sensors, targets, "LogDet")
print("bundle sizes:", bundles.bundle_sizes())
for t in targets:
    chosen = [s for s in sensors if s.id in bundles.bundles[t.id]]
    print(f"  target {t.id}: log det {evaluate('LogDet', chosen, MeasureContext(t)):.2f}")
