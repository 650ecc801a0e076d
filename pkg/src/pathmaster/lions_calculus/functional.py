"""Scalar functionals of (time, path measure) with optional closed-form derivatives."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import EvaluationError


def running_integral(values, grid, t):
    """int_0^t omega_s ds for the piecewise-constant (left-point) reading of grid paths.

    ``values`` has shape (N, M+1, d); the result has shape (N, d).  With
    ``k`` the grid index at or below ``t`` this is
    ``dt * sum_{j<k} omega_j + (t - t_k) * omega_k``, so the stopped
    extension of a path grows linearly in ``t`` past its stopping point.
    """
    k = grid.index_at(t)
    head = values[:, :k].sum(axis=1) * grid.dt
    return head + (t - grid.time(k)) * values[:, k]


@dataclass(frozen=True)
class MeasureFunctional:
    """f(t, mu) with optional closed forms.

    Attributes
    ----------
    value : callable (t, mu) -> float
    dt : callable (t, mu) -> float, optional
        Right time derivative along the stopped extension.
    dmu : callable (t, mu, paths=None) -> (n, d), optional
        Lions derivative evaluated on ``paths`` (defaults to mu's particles).
    dwdmu : callable (t, mu, paths=None) -> (n, d, d), optional
        Path derivative of the Lions derivative.
    flags : dict
        Growth declarations such as ``bounded_dt`` or ``linear_growth``.
    """

    value: object
    dt: object = None
    dmu: object = None
    dwdmu: object = None
    name: str = "functional"
    flags: dict = field(default_factory=dict, compare=False)

    def __call__(self, t, mu):
        v = float(self.value(t, mu))
        if not np.isfinite(v):
            raise EvaluationError(f"{self.name} returned {v} at t={t}")
        return v

    @property
    def has_derivatives(self):
        return self.dt is not None and self.dmu is not None and self.dwdmu is not None


def moment_functional(power=2, coeff=1.0, name=None):
    """E[c X_t^p] for d = 1, with derivatives."""
    def value(t, mu):
        return coeff * float(np.mean(mu.marginal(t)[:, 0] ** power))

    def dmu(t, mu, paths=None):
        x = (mu.values if paths is None else paths)[:, mu.grid.index_at(t), :]
        return coeff * power * x ** (power - 1) if power else np.zeros_like(x)

    def dwdmu(t, mu, paths=None):
        x = (mu.values if paths is None else paths)[:, mu.grid.index_at(t), :]
        g = coeff * power * (power - 1) * x ** (power - 2) if power > 1 else np.zeros_like(x)
        return g[:, :, None]

    return MeasureFunctional(value, dt=lambda t, mu: 0.0, dmu=dmu, dwdmu=dwdmu,
                             name=name or f"E[{coeff}*X_t^{power}]")
