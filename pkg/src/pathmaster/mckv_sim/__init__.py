"""Particle simulation of controlled McKean-Vlasov dynamics."""

from ..rng import BrownianDriver
from .dynamics import ActionSet, DynamicsSpec, Snapshot, as_vol_matrix, constant_dynamics
from .semimartingale import (FAMILIES, MomentReport, PLSample, SemimartingaleSpec,
                             iter_PL, moment_bound_check, sample_PL)
from .simulate import Trajectory, simulate_mkv, simulate_trajectory

__all__ = [
    "ActionSet", "BrownianDriver", "DynamicsSpec", "FAMILIES", "MomentReport", "PLSample",
    "SemimartingaleSpec", "Snapshot", "Trajectory", "as_vol_matrix", "constant_dynamics", "iter_PL",
    "moment_bound_check", "sample_PL", "simulate_mkv", "simulate_trajectory",
]
