"""Distorted expectations of Phi(X_T) under Brownian continuation (d = 1).

For a distortion kappa and the payoff g = Phi (standard normal cdf),

    V(t, mu) = int_0^1 kappa(P(Phi(X_T) >= y)) dy
             = int kappa(p(z)) phi(z) dz,    p(z) = E[Phi((X_t - z) / sqrt(tau))],

after substituting y = Phi(z).  The z-integral is a trapezoid rule on
[-9, 9].  At t = T the layer-cake sum over sorted payoffs is used instead.
"""

import math

import numpy as np
from scipy.special import ndtr

from ..errors import ConfigurationError, DomainError
from ..lions_calculus import MeasureFunctional
from ..master_core.generators import heat_generator
from .entry import ReferenceEntry
from .heat import terminal_draws

Z_LIMIT = 9.0


def _phi(x):
    return np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


class Distortion:
    """kappa on [0, 1] with derivative, or ``dkappa=None`` when only continuous."""

    def __init__(self, name, kappa, dkappa=None):
        self.name = name
        self.kappa = kappa
        self.dkappa = dkappa

    @property
    def smooth(self):
        return self.dkappa is not None


def _reverse_s(amp=0.6):
    w = 2 * math.pi
    return Distortion("reverse_s", lambda p: p + amp * np.sin(w * p) / w,
                      lambda p: 1 + amp * np.cos(w * p))


PL_KNOTS = np.array([[0.0, 0.0], [0.2, 0.4], [0.8, 0.6], [1.0, 1.0]])


def _pl_extended(p):
    """Piecewise-linear kappa, extended linearly beyond [0, 1]."""
    xs, ys = PL_KNOTS[:, 0], PL_KNOTS[:, 1]
    p = np.asarray(p, dtype=float)
    out = np.interp(p, xs, ys)
    lo_slope = (ys[1] - ys[0]) / (xs[1] - xs[0])
    hi_slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
    out = np.where(p < 0, p * lo_slope, out)
    return np.where(p > 1, 1 + (p - 1) * hi_slope, out)


def _pl_antiderivative(p):
    xs, ys = PL_KNOTS[:, 0], PL_KNOTS[:, 1]
    p = np.asarray(p, dtype=float)
    lo_slope = (ys[1] - ys[0]) / (xs[1] - xs[0])
    hi_slope = (ys[-1] - ys[-2]) / (xs[-1] - xs[-2])
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (ys[1:] + ys[:-1]) * np.diff(xs))])
    inside = np.clip(p, 0, 1)
    j = np.clip(np.searchsorted(xs, inside, side="right") - 1, 0, len(xs) - 2)
    val = cum[j] + 0.5 * (ys[j] + _pl_extended(inside)) * (inside - xs[j])
    below = np.minimum(p, 0)
    above = np.maximum(p - 1, 0)
    return val + 0.5 * lo_slope * below ** 2 + above * (1 + 0.5 * hi_slope * above)


def _pl_mollified(n):
    """Window average of width 1/n; C^1, exact at 0 and 1 once 1/(2n) <= 0.2, and within 1/n of kappa."""
    w = 0.5 / n

    def kappa(p):
        return n * (_pl_antiderivative(np.asarray(p) + w) - _pl_antiderivative(np.asarray(p) - w))

    def dkappa(p):
        return n * (_pl_extended(np.asarray(p) + w) - _pl_extended(np.asarray(p) - w))
    return Distortion(f"piecewise_linear/n={n}", kappa, dkappa)


def get_distortion(kappa_id, mollify_n=None):
    if kappa_id == "identity":
        return Distortion("identity", lambda p: np.asarray(p, dtype=float),
                          lambda p: np.ones_like(np.asarray(p, dtype=float)))
    if kappa_id == "reverse_s":
        return _reverse_s()
    if kappa_id == "piecewise_linear":
        if mollify_n is None:
            return Distortion("piecewise_linear", _pl_extended)
        if mollify_n < 3:
            raise DomainError("mollify_n must be at least 3")
        return _pl_mollified(int(mollify_n))
    raise ConfigurationError(f"unknown distortion id {kappa_id!r}")


def layer_cake(samples, kappa):
    """``int_0^inf kappa(P(Y >= y)) dy`` for the empirical law of nonnegative samples."""
    y = np.sort(np.asarray(samples, dtype=float))
    if y.size == 0 or y[0] < 0:
        raise DomainError("layer-cake needs nonempty nonnegative samples")
    n = y.size
    steps = np.diff(np.concatenate([[0.0], y]))
    probs = (n - np.arange(n)) / n
    return math.fsum(np.asarray(kappa(probs), dtype=float) * steps)


def _zgrid(tau, h_max=0.02):
    h = min(math.sqrt(tau) / 6, h_max)
    n = int(math.ceil(2 * Z_LIMIT / h)) + 1
    z = np.linspace(-Z_LIMIT, Z_LIMIT, n)
    w = np.full(n, z[1] - z[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    return z, w * _phi(z)


def _kernel(x, z, s):
    """Phi((x - z)/s) and its x-derivatives, shape (len(x), len(z))."""
    arg = (x[:, None] - z[None, :]) / s
    dens = _phi(arg)
    return ndtr(arg), dens / s, -arg * dens / (s * s)


def distortion_value(kappa_id="reverse_s", mollify_n=None):
    """Reference entry for the distorted value of Phi(X_T); derivatives only for C^1 kappa."""
    dist = get_distortion(kappa_id, mollify_n)

    def _x(t, mu, paths=None):
        v = mu.values if paths is None else paths
        if mu.d != 1:
            raise DomainError("distortion values are for d = 1")
        return v[:, mu.grid.index_at(t), 0]

    def _tau(t, mu):
        tau = mu.grid.T - t
        if tau < -1e-12:
            raise DomainError("t exceeds the horizon")
        return max(tau, 0.0)

    def _weights(t, mu):
        tau = _tau(t, mu)
        if tau <= 0:
            raise DomainError("derivatives need t < T")
        z, w = _zgrid(tau)
        s = math.sqrt(tau)
        I, _, _ = _kernel(_x(t, mu), z, s)
        p = I.mean(axis=0)
        return z, w * dist.dkappa(p), s, tau

    def value(t, mu):
        tau = _tau(t, mu)
        if tau == 0:
            return layer_cake(ndtr(_x(t, mu)), dist.kappa)
        z, w = _zgrid(tau)
        I, _, _ = _kernel(_x(t, mu), z, math.sqrt(tau))
        return float(np.dot(w, dist.kappa(I.mean(axis=0))))

    def dt(t, mu):
        z, w, s, tau = _weights(t, mu)
        x = _x(t, mu)
        arg = (x[:, None] - z[None, :]) / s
        # time derivative of Phi((x - z)/sqrt(T - t))
        It = (arg * _phi(arg) / (2 * tau)).mean(axis=0)
        return float(np.dot(w, It))

    def dmu(t, mu, paths=None):
        z, w, s, _ = _weights(t, mu)
        _, Ix, _ = _kernel(_x(t, mu, paths), z, s)
        return (Ix @ w)[:, None]

    def dwdmu(t, mu, paths=None):
        z, w, s, _ = _weights(t, mu)
        _, _, Ixx = _kernel(_x(t, mu, paths), z, s)
        return (Ixx @ w)[:, None, None]

    if dist.smooth:
        fn = MeasureFunctional(value, dt, dmu, dwdmu, name=f"distortion/{dist.name}",
                               flags={"state_dependent": True})
        gen = heat_generator()
    else:
        fn = MeasureFunctional(value, name=f"distortion/{dist.name}", flags={"state_dependent": True})
        gen = None
    return ReferenceEntry(f"distortion/{dist.name}", fn, gen, fn if dist.smooth else None,
                          note="distorted expectation of Phi(X_T), payoff in [0, 1]",
                          meta={"kappa": dist, "payoff": "normal_cdf"})


def distortion_value_mc(kappa_id, t, mu, n_draws=1_000_000, seed=0, mollify_n=None):
    """Layer-cake estimate on the same draws as ``heat_value_mc('terminal_normal_cdf', ...)``."""
    dist = get_distortion(kappa_id, mollify_n)
    return layer_cake(ndtr(terminal_draws(t, mu, n_draws, seed)), dist.kappa)
