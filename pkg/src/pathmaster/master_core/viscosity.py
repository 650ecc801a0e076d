"""Generator inequality at a jet: the sub/supersolution test."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from .solutions import CandidateSolution


@dataclass
class ViscosityReport:
    side: str
    scalar: float
    stderr: float
    tolerance: float
    passed: bool
    membership: object = None


def viscosity_check(V, G, t, mu, jet, side, membership=None, batches=10, min_tol=1e-9):
    """Evaluate ``v + G(t, mu, V(t, mu), Z, Gamma)`` and test its sign.

    Subsolution side requires ``>= -tol``, supersolution side ``<= tol``,
    with ``tol = max(3 * stderr, min_tol)``.  The standard error comes from
    recomputing the expectation inside G on ``batches`` disjoint particle
    groups.
    """
    if side != jet.side:
        raise ConfigurationError(f"a {jet.side}jet cannot be used for the {side} side")
    if membership is not None and not membership.plausible:
        raise ConfigurationError("the jet was refuted by the membership test")
    V = CandidateSolution.wrap(V)
    y = V(t, mu)
    Z, Gm = jet.coefficients(mu)
    scalar = jet.v + G(t, mu, y, Z, Gm) - V.discount * y
    parts = []
    if batches and batches > 1 and mu.N >= 2 * batches:
        for idx in np.array_split(np.arange(mu.N), batches):
            parts.append(jet.v + G(t, mu.subset(idx), y, Z[idx], Gm[idx]) - V.discount * y)
    stderr = float(np.std(parts, ddof=1) / np.sqrt(len(parts))) if len(parts) > 1 else 0.0
    tol = max(3 * stderr, min_tol)
    passed = scalar >= -tol if side == "sub" else scalar <= tol
    return ViscosityReport(side, float(scalar), stderr, tol, bool(passed), membership)
