"""Candidate solutions, classical residuals and the exponential change of variable."""

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from ..lions_calculus import MeasureFunctional, numeric_dmu, numeric_dwdmu, time_derivative
from .generators import GeneratorSpec


@dataclass(frozen=True)
class CandidateSolution:
    """A value function with its derivative bundle.

    ``discount`` is the coefficient ``lam`` of a ``-lam V`` term added to the
    equation; it is zero except after ``exponential_change``.
    """

    functional: MeasureFunctional
    discount: float = 0.0
    name: str = "candidate"

    def __call__(self, t, mu):
        return self.functional(t, mu)

    @classmethod
    def wrap(cls, V):
        if isinstance(V, CandidateSolution):
            return V
        if isinstance(V, MeasureFunctional):
            return cls(V, name=V.name)
        return cls(MeasureFunctional(V), name=getattr(V, "__name__", "candidate"))

    def bundle(self, t, mu, numeric=False):
        """(d_t V, d_mu V (N, d), symmetrized d_w d_mu V (N, d, d)) at the particles of ``mu``."""
        f = self.functional
        if f.has_derivatives:
            dt, dm, dw = f.dt(t, mu), np.asarray(f.dmu(t, mu)), np.asarray(f.dwdmu(t, mu))
        elif numeric:
            dt = f.dt(t, mu) if f.dt is not None else time_derivative(f, t, mu)
            dm = np.asarray(f.dmu(t, mu)) if f.dmu is not None else numeric_dmu(f, t, mu)
            dw = np.asarray(f.dwdmu(t, mu)) if f.dwdmu is not None else numeric_dwdmu(f, t, mu)
        else:
            raise ConfigurationError(f"{self.name} has no derivative bundle; pass numeric=True")
        dm = dm.reshape(mu.N, mu.d)
        dw = dw.reshape(mu.N, mu.d, mu.d)
        return float(dt), dm, 0.5 * (dw + np.swapaxes(dw, 1, 2))


def classical_residual(V, G, t, mu, numeric=False):
    """``d_t V + G(t, mu, V, d_mu V, d_w d_mu V) - discount V`` at (t, mu)."""
    V = CandidateSolution.wrap(V)
    dt, dm, dw = V.bundle(t, mu, numeric)
    y = V(t, mu)
    return dt + G(t, mu, y, dm, dw) - V.discount * y


def exponential_change(V, G, lam):
    """Return ``(V~, G~)`` with ``V~ = e^{lam t} V`` and
    ``G~(t, mu, y, Z, Gamma) = e^{lam t} G(t, mu, e^{-lam t} y, e^{-lam t} Z, e^{-lam t} Gamma)``.

    The transformed candidate carries ``discount + lam`` so that its
    residual equals ``e^{lam t}`` times the original one.
    """
    V = CandidateSolution.wrap(V)
    f = V.functional
    lam = float(lam)

    def value(t, mu):
        return math.exp(lam * t) * f(t, mu)

    dt = dmu = dwdmu = None
    if f.dt is not None:
        def dt(t, mu):
            return math.exp(lam * t) * (f.dt(t, mu) + lam * f(t, mu))
    if f.dmu is not None:
        def dmu(t, mu, paths=None):
            return math.exp(lam * t) * np.asarray(f.dmu(t, mu, paths))
    if f.dwdmu is not None:
        def dwdmu(t, mu, paths=None):
            return math.exp(lam * t) * np.asarray(f.dwdmu(t, mu, paths))

    Vt = CandidateSolution(MeasureFunctional(value, dt, dmu, dwdmu, name=f"exp({lam})*{f.name}",
                                             flags=dict(f.flags)),
                           V.discount + lam, f"exp({lam})*{V.name}")

    def func(t, mu, y, Z, Gamma):
        e = math.exp(-lam * t)
        return G(t, mu, e * y, e * Z, e * Gamma) / e
    Gt = GeneratorSpec(func, G.L0, f"exp({lam})*{G.name}")
    return Vt, Gt
