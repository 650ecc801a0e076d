"""
Chain rule on a particle flow
=============================

Simulate a mean-field particle system, then check that the change of a
path functional along the flow matches the sum of its time, measure and
pathwise-measure derivatives.  The mismatch should shrink linearly in
the step size.
"""

import numpy as np

from pathmaster.closed_forms import lookup
from pathmaster.lions_calculus import ito_residual
from pathmaster.mckv_sim import DynamicsSpec, simulate_trajectory
from pathmaster.path_measure import PathMeasure, TimeGrid

f = lookup("quadratic").functional
dyn = DynamicsSpec(drift=lambda s, a: np.sin(s.state), vol=lambda s, a: 1.0, d=1, L=1.0)

print(f"{'M':>5} {'dt':>8} {'residual':>11} {'stderr':>9} {'relative':>9}")
rows = []
for M in (25, 50, 100, 200):
    mu = PathMeasure.constant(TimeGrid(1.0, M), np.zeros(20000))
    rep = ito_residual(f, simulate_trajectory(0.0, mu, dyn, seed=0))
    rows.append((mu.grid.dt, rep.residual))
    print(f"{M:5d} {mu.grid.dt:8.4f} {rep.residual:11.2e} {rep.stderr:9.1e} {rep.relative:9.2%}")

# slope of log|residual| against log dt
dts, res = np.array(rows).T
print("refinement slope:", round(np.polyfit(np.log(dts), np.log(np.abs(res)), 1)[0], 3))
