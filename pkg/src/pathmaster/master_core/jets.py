"""Paraboloid test functions and sampled semi-jet membership.

A jet (y, v, Z, Gamma) at (t, mu) defines

    phi(s, P) = y + v (s - t) + E^P[ Z(X) . D + D^T Gamma(X) D / 2 ],   D = X_s - X_t,

with Z and Gamma read from the path stopped at t.  A subjet candidate
needs ``phi - V >= 0`` near (t, mu), a superjet candidate ``V - phi >= 0``.
Sampling can refute membership but never certify it, so the verdicts
are ``refuted`` and ``plausible``.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from ..lions_calculus import MeasureFunctional
from ..mckv_sim import iter_PL
from ..rng import TAG_AUXILIARY, BrownianDriver
from .solutions import CandidateSolution

SIDES = ("sub", "super")


@dataclass(frozen=True)
class JetSpec:
    t: float
    y: float
    v: float
    Z: object
    Gamma: object
    delta: float
    L: float
    side: str = "sub"

    def __post_init__(self):
        if self.side not in SIDES:
            raise DomainError(f"side must be one of {SIDES}")
        if not (self.delta > 0 and self.L > 0):
            raise DomainError("delta and L must be positive")

    def coefficients(self, P):
        """Z (N, d) and symmetrized Gamma (N, d, d) on the particles of P stopped at t."""
        k = P.grid.index_at(self.t)
        stopped = P.values[:, :k + 1]
        Z = np.asarray(self.Z(stopped), dtype=float).reshape(P.N, P.d)
        G = np.asarray(self.Gamma(stopped), dtype=float).reshape(P.N, P.d, P.d)
        return Z, 0.5 * (G + np.swapaxes(G, 1, 2))


def paraboloid_eval(jet, s, P, coeffs=None):
    """phi(s, P); ``coeffs`` reuses (Z, Gamma) when P is known to agree with their measure up to t."""
    if s < jet.t - 1e-12:
        raise DomainError("paraboloid needs s >= t")
    grid = P.grid
    D = P.values[:, grid.index_at(s)] - P.values[:, grid.index_at(jet.t)]
    Z, G = jet.coefficients(P) if coeffs is None else coeffs
    quad = np.einsum("nd,nd->n", Z, D) + 0.5 * np.einsum("ni,nij,nj->n", D, G, D)
    return jet.y + jet.v * (s - jet.t) + float(np.mean(quad))


def paraboloid_functional(jet):
    """The paraboloid as a functional of (s, P), s >= t, with exact derivatives.

    At a grid time s > t on a measure stopped at t, the derivatives reduce
    to v, Z and the symmetrized Gamma.
    """
    def parts(s, P, paths=None):
        v = P.values if paths is None else paths
        k_t, k_s = P.grid.index_at(jet.t), P.grid.index_at(s)
        D = v[:, k_s] - v[:, k_t]
        Z = np.asarray(jet.Z(v[:, :k_t + 1]), dtype=float).reshape(len(v), P.d)
        G = np.asarray(jet.Gamma(v[:, :k_t + 1]), dtype=float).reshape(len(v), P.d, P.d)
        return D, Z, 0.5 * (G + np.swapaxes(G, 1, 2))

    def dmu(s, P, paths=None):
        D, Z, G = parts(s, P, paths)
        return Z + np.einsum("nij,nj->ni", G, D)

    def dwdmu(s, P, paths=None):
        return parts(s, P, paths)[2]
    return MeasureFunctional(lambda s, P: paraboloid_eval(jet, s, P), dt=lambda s, P: jet.v,
                             dmu=dmu, dwdmu=dwdmu, name="paraboloid")


def true_jet(V, t, mu, delta, L, side="sub", slack=0.01):
    """Jet built from V's own derivatives at (t, mu), with the slope moved by ``slack``.

    The slope is raised by ``slack`` for a subjet and lowered for a
    superjet, which absorbs third-order remainders over a short window.
    """
    V = CandidateSolution.wrap(V)
    f = V.functional
    if not f.has_derivatives:
        raise DomainError("true_jet needs closed-form derivatives")
    sign = 1.0 if side == "sub" else -1.0

    def Z(stopped):
        return f.dmu(t, mu, _extend(stopped, mu))

    def Gamma(stopped):
        return f.dwdmu(t, mu, _extend(stopped, mu))
    return JetSpec(t, V(t, mu), float(f.dt(t, mu)) + sign * slack, Z, Gamma, delta, L, side)


def _extend(stopped, mu):
    """Pad a stopped history (n, k+1, d) to the full grid by holding the last value."""
    n, k1, d = stopped.shape
    out = np.empty((n, mu.grid.M + 1, d))
    out[:, :k1] = stopped
    out[:, k1:] = stopped[:, -1:]
    return out


@dataclass
class MembershipReport:
    status: str
    samples: int
    min_gap: float
    witness: dict = field(default=None)
    descriptions: list = field(default_factory=list, repr=False)

    @property
    def plausible(self):
        return self.status == "plausible"


def jet_membership_test(V, jet, t, mu, K=1000, seed=0, family="default", slack=1e-9):
    """Sample (s, P) pairs and look for a violation of the jet inequality.

    P comes from ``iter_PL(t, mu, L, K, family, horizon=t+delta)``; s is
    uniform over the grid times in (t, t + delta].  The gap is ``phi - V``
    for a subjet and ``V - phi`` for a superjet; a gap below ``-slack``
    refutes.  The base point itself is also checked.
    """
    V = CandidateSolution.wrap(V)
    if abs(jet.t - t) > 1e-12:
        raise DomainError("jet base time differs from t")
    grid = mu.grid
    sign = 1.0 if jet.side == "sub" else -1.0
    k0 = grid.index_at(t)
    k1 = grid.index_at(min(grid.T, t + jet.delta))
    if k1 <= k0:
        raise DomainError("window (t, t + delta] holds no grid time")
    # every sample agrees with mu up to t, so the coefficients are shared
    coeffs = jet.coefficients(mu)
    gaps = [sign * (paraboloid_eval(jet, t, mu, coeffs) - V(t, mu))]
    samples = iter_PL(t, mu, jet.L, K, family=family, seed=seed, horizon=grid.time(k1))
    picks = BrownianDriver(seed, (TAG_AUXILIARY,)).rng(TAG_AUXILIARY).integers(k0 + 1, k1 + 1, size=K)
    witness = None
    descriptions = []
    if gaps[0] < -slack:
        witness = {"index": -1, "s": t, "gap": gaps[0], "measure": mu, "description": "base point"}
    for j, ((P, text), k) in enumerate(zip(samples, picks)):
        descriptions.append(text)
        s = grid.time(int(k))
        gap = sign * (paraboloid_eval(jet, s, P, coeffs) - V(s, P))
        gaps.append(gap)
        if witness is None and gap < -slack:
            witness = {"index": j, "s": s, "gap": gap, "measure": P,
                       "description": text}
    status = "refuted" if witness is not None else "plausible"
    return MembershipReport(status, K, float(min(gaps)), witness, descriptions)
