"""A path-dependent functional mixing the current value with the running integral.

    f(t, mu) = E[X_t I_t] - E[X_t^2] E[I_t],   I_t = int_0^t X_s ds   (d = 1)

Bumping a particle on [t, T] moves X_t but not I_t, which gives

    d_t f       = E[X_t^2] - E[X_t^2] E[X_t]
    d_mu f(w)   = I_t(w) - 2 w_t E[I_t]
    d_w d_mu f  = -2 E[I_t]
"""

import numpy as np

from ..lions_calculus import MeasureFunctional, running_integral
from .entry import ReferenceEntry


def _parts(t, mu, paths=None):
    v = mu.values if paths is None else paths
    x = v[:, mu.grid.index_at(t), 0]
    integral = running_integral(v, mu.grid, t)[:, 0]
    return x, integral


def _value(t, mu):
    x, I = _parts(t, mu)
    return float(np.mean(x * I) - np.mean(x * x) * np.mean(I))


def _dt(t, mu):
    x, _ = _parts(t, mu)
    m2 = np.mean(x * x)
    return float(m2 - m2 * np.mean(x))


def _dmu(t, mu, paths=None):
    _, I_mu = _parts(t, mu)
    x, I = _parts(t, mu, paths)
    return (I - 2.0 * x * np.mean(I_mu))[:, None]


def _dwdmu(t, mu, paths=None):
    _, I_mu = _parts(t, mu)
    n = mu.N if paths is None else len(paths)
    return np.full((n, 1, 1), -2.0 * np.mean(I_mu))


def example_quadratic():
    f = MeasureFunctional(_value, dt=_dt, dmu=_dmu, dwdmu=_dwdmu, name="quadratic",
                          flags={"bounded_dt": False, "linear_growth": True})
    return ReferenceEntry("quadratic", f, note="running-integral product functional, d=1")
