"""
Testing a candidate solution through its jets
=============================================

Build sub- and super-jets from a closed-form semilinear solution, try to
refute them with sampled semimartingale perturbations, then evaluate the
viscosity inequality.  Adding 0.1 (T - t) to the solution breaks the
subsolution side by about 0.1.
"""

import numpy as np

from pathmaster.closed_forms import lookup
from pathmaster.lions_calculus import MeasureFunctional
from pathmaster.master_core import jet_membership_test, true_jet, viscosity_check
from pathmaster.mckv_sim import constant_dynamics, simulate_mkv
from pathmaster.path_measure import PathMeasure, TimeGrid

entry = lookup("semilinear/half_square/neg_abs")
V = entry.functional
corrupted = MeasureFunctional(lambda t, mu: V(t, mu) + 0.1 * (1 - t), dt=lambda t, mu: V.dt(t, mu) - 0.1,
                              dmu=V.dmu, dwdmu=V.dwdmu, name="corrupted")

x0 = np.random.default_rng(0).normal(0.0, 0.5, 1600)
mu = simulate_mkv(0.0, PathMeasure.constant(TimeGrid(1.0, 1000), x0), constant_dynamics(0.2, 0.7), seed=0)

for name, f in (("solution", V), ("corrupted", corrupted)):
    for side in ("sub", "super"):
        jet = true_jet(f, 0.5, mu, delta=0.002, L=1.0, side=side)
        mem = jet_membership_test(f, jet, 0.5, mu, K=200)
        rep = viscosity_check(f, entry.generator, 0.5, mu, jet, side)
        verdict = "holds" if rep.passed else "fails"
        print(f"{name:>9} {side:>5}: jet {mem.status}, scalar {rep.scalar:+.3f} -> {verdict}")
