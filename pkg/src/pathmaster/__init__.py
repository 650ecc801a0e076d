"""Particle-level laboratory for pathwise calculus on Wasserstein space.

Subpackages
-----------
path_measure    grids, empirical path measures, transport, couplings
mckv_sim        Euler-Maruyama particle systems and L-bounded samplers
lions_calculus  measure functionals, numeric derivatives, Ito residuals
master_core     generators, paraboloids, semi-jets, viscosity checks
control_value   closed-loop policies, value search, DPP, counterexamples
closed_forms    registry of explicit functionals and solutions
cli             reproducible batch runner

Example
-------
>>> import numpy as np
>>> from pathmaster.path_measure import TimeGrid, PathMeasure, wasserstein2
>>> g = TimeGrid(1.0, 4)
>>> mu = PathMeasure.constant(g, [0.0, 2.0])
>>> nu = PathMeasure.constant(g, [1.0, 3.0])
>>> round(wasserstein2(mu, nu)[0], 12)
1.0
"""

__version__ = "0.1.0"
