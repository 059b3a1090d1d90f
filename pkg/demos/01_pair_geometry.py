"""How good can two range sensors be?

Walks through the two-sensor lower bound on the inverse condition number:
its closed polar form, where it peaks, and why adding sensors can lower it.
Run: python3 demos/01_pair_geometry.py
"""

# %%
import math

import numpy as np

from obsassign import MeasureContext, TargetBelief, Point2, evaluate, lower_bound, sensors_from_xy
from obsassign.observability import build_relative_block, pair_lower_bound_polar

# %% Two sensors seen from the target at distance d_io, ratio alpha, bearing gap theta.
d, u = 1.0, 1.0
print("bound at the best geometry (alpha=1, theta=90 deg):", pair_lower_bound_polar(d, 1.0, math.pi / 2, u))
print("ceiling 1/sqrt(1 + u^2/d^2):                        ", 1 / math.sqrt(1 + u * u / (d * d)))

# %% Collinear pairs carry no information about the cross-range direction.
for theta_deg in (0, 30, 60, 90, 120, 150, 180):
    print(f"theta={theta_deg:>3} deg  bound={pair_lower_bound_polar(d, 1.0, math.radians(theta_deg), u):.4f}")

# %% At a fixed 45 deg gap the best alpha is no longer 1.
alphas = np.linspace(0.05, 3, 296)
vals = [pair_lower_bound_polar(d, a, math.pi / 4, u) for a in alphas]
print("theta=45 deg: best alpha ~", round(float(alphas[int(np.argmax(vals))]), 2))

# %% The polar form agrees with the matrix form.
si, sj = sensors_from_xy([(3.0, 1.0), (-2.0, 4.0)])
o = (0.5, -0.5)
print("matrix form:", lower_bound(build_relative_block([si, sj], o), u))

# %% More sensors are not always better for this bound.
r3 = math.sqrt(3)
sensors = sensors_from_xy([(0, 0), (2 * r3, -9), (r3, 3)])
ctx = MeasureContext(TargetBelief(Point2(r3, 1.0), np.eye(2), 1.0, 1))
print("omega({s1,s3})    =", round(evaluate("PairLowerBound", [sensors[0], sensors[2]], ctx), 4))
print("omega({s1,s2,s3}) =", round(evaluate("PairLowerBound", sensors, ctx), 4))
