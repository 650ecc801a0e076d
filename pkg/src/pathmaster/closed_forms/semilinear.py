"""Semilinear value functions with a scalar nonlinearity of E[d_mu V] (d = 1).

The equation is ``d_t V + E[d_w d_mu V] / 2 + G1(E[d_mu V]) = 0`` with
``V(T, mu) = E[g(X_T)]``, g Lipschitz with constant L0.  With
``u(s2, x) = E[g(x + sqrt(s2) Z)]`` and tau = T - t the solution is a
one-parameter optimization over constant drifts:

    concave g, convex G1:   V = sup_a  E[u(tau, X_t + a tau)] - b(a) tau,
                            b(a) = sup_{|y| <= L0} (a y - G1(y))
    convex g, concave G1:   V = inf_a  E[u(tau, X_t + a tau)] - b(a) tau,
                            b(a) = inf_{|y| <= L0} (a y - G1(y))

For fixed a the bracket solves the linear equation with source
``b(a) - a E[d_mu V]``, so the residual of the nonlinear equation is
``b(a*) - a* p + G1(p)`` with ``p = E[d_mu V]``; conjugacy makes it vanish
at the optimizer.  Derivatives follow from the envelope theorem at the
optimizer (a derived result, flagged in ``meta``).

Mollification replaces g by its Gaussian smoothing at scale 1/n (so
``|g_n - g| <= sqrt(2/pi)/n``) and likewise for the ``abs`` nonlinearities.
"""

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.hermite_e import hermegauss
from scipy.optimize import minimize_scalar
from scipy.special import ndtr

from ..errors import ConfigurationError, DomainError
from ..lions_calculus import MeasureFunctional
from ..master_core.generators import semilinear_generator
from .entry import ReferenceEntry

_NODES, _WEIGHTS = hermegauss(48)
_WEIGHTS = _WEIGHTS / math.sqrt(2 * math.pi)


def _phi(x):
    return np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


def _logcosh(y):
    a = np.abs(y)
    return a + np.log1p(np.exp(-2 * a)) - math.log(2)


def _smooth_abs(x, s):
    """E|x + sZ| and its first two x-derivatives."""
    if s == 0:
        return np.abs(x), np.sign(x), np.zeros_like(x)
    r = x / s
    return x * (2 * ndtr(r) - 1) + 2 * s * _phi(r), 2 * ndtr(r) - 1, 2 * _phi(r) / s


def _smooth_logcosh(x, s):
    if s == 0:
        th = np.tanh(x)
        return _logcosh(x), th, 1 - th * th
    y = x[..., None] + s * _NODES
    th = np.tanh(y)
    return _logcosh(y) @ _WEIGHTS, th @ _WEIGHTS, (1 - th * th) @ _WEIGHTS


# terminal payoffs: (smoother, sign, concave?)
PAYOFFS = {
    "neg_logcosh": (_smooth_logcosh, -1.0, True),
    "logcosh": (_smooth_logcosh, 1.0, False),
    "neg_abs": (_smooth_abs, -1.0, True),
    "abs": (_smooth_abs, 1.0, False),
}


@dataclass(frozen=True)
class Nonlinearity:
    name: str
    func: object
    conjugate: object
    convex: bool
    concave: bool
    lip: float


def _numeric_conjugate(G1, L0, convex):
    sgn = 1.0 if convex else -1.0

    def b(a):
        # sup (convex) or inf (concave) of a y - G1(y) over [-L0, L0]
        res = minimize_scalar(lambda y: -sgn * (a * y - G1(y)), bounds=(-L0, L0), method="bounded",
                              options={"xatol": 1e-12})
        ends = [sgn * (a * y - G1(y)) for y in (-L0, L0)]
        return sgn * max(-res.fun, *ends)
    return b


def get_nonlinearity(G1_id, L0=1.0, mollify_n=None):
    if G1_id == "zero":
        return Nonlinearity("zero", lambda y: 0.0 * y, None, True, True, 0.0)
    if G1_id == "half_square":
        def b(a):
            return 0.5 * a * a if abs(a) <= L0 else L0 * abs(a) - 0.5 * L0 * L0
        return Nonlinearity("half_square", lambda y: 0.5 * y * y, b, True, False, L0)
    if G1_id == "neg_half_square":
        def b(a):
            return -0.5 * a * a if abs(a) <= L0 else -L0 * abs(a) + 0.5 * L0 * L0
        return Nonlinearity("neg_half_square", lambda y: -0.5 * y * y, b, False, True, L0)
    if G1_id in ("abs", "neg_abs"):
        sgn = 1.0 if G1_id == "abs" else -1.0
        if mollify_n:
            s = 1.0 / mollify_n
            func = (lambda y: sgn * _smooth_abs(np.asarray(y, dtype=float), s)[0])
            return Nonlinearity(f"{G1_id}/n={mollify_n}", func,
                                _numeric_conjugate(func, L0, sgn > 0), sgn > 0, sgn < 0, 1.0)

        def b(a):
            return sgn * L0 * max(abs(a) - 1.0, 0.0)
        return Nonlinearity(G1_id, lambda y: sgn * np.abs(y), b, sgn > 0, sgn < 0, 1.0)
    raise ConfigurationError(f"unknown nonlinearity id {G1_id!r}")


def _zero_conjugate(L0, convex):
    return (lambda a: L0 * abs(a)) if convex else (lambda a: -L0 * abs(a))


@dataclass
class SemilinearSolver:
    payoff: str
    G1: Nonlinearity
    L0: float
    a_bound: float
    smoothing: float = 0.0

    def __post_init__(self):
        smoother, self.sign, self.concave = PAYOFFS[self.payoff]
        self._smoother = smoother
        if self.concave and not self.G1.convex:
            raise ConfigurationError("concave payoff needs a convex nonlinearity")
        if not self.concave and not self.G1.concave:
            raise ConfigurationError("convex payoff needs a concave nonlinearity")
        self.b = self.G1.conjugate or _zero_conjugate(self.L0, self.concave)

    def u(self, x, s2):
        s = math.sqrt(s2 + self.smoothing ** 2)
        v, dv, d2v = self._smoother(np.asarray(x, dtype=float), s)
        return self.sign * v, self.sign * dv, self.sign * d2v

    def objective(self, a, x, tau):
        return float(np.mean(self.u(x + a * tau, tau)[0])) - self.b(a) * tau

    def optimize(self, x, tau):
        """Optimizer a* and value; a* = 0 when tau = 0."""
        if tau <= 0:
            return 0.0, float(np.mean(self.u(x, 0.0)[0]))
        s = -1.0 if self.concave else 1.0
        res = minimize_scalar(lambda a: s * self.objective(a, x, tau),
                              bounds=(-self.a_bound, self.a_bound), method="bounded",
                              options={"xatol": 1e-10})
        best_a, best = float(res.x), s * float(res.fun)
        for a in (-self.a_bound, 0.0, self.a_bound):
            v = self.objective(a, x, tau)
            if (v > best) if self.concave else (v < best):
                best_a, best = a, v
        return best_a, best


def semilinear_solution(G1_id="half_square", g_id="neg_logcosh", L0=1.0, a_bound=3.0,
                        mollify_n=None):
    """Reference entry with the envelope derivative bundle.

    ``a_bound`` truncates the drift parameter; ``meta['truncation'](t, mu)``
    reports the value change when the bound is doubled.
    """
    if g_id not in PAYOFFS:
        raise ConfigurationError(f"unknown payoff id {g_id!r}")
    if not L0 >= 1.0:
        raise DomainError("the payoffs have Lipschitz constant 1, so L0 must be >= 1")
    G1 = get_nonlinearity(G1_id, L0, mollify_n)
    smoothing = 1.0 / mollify_n if mollify_n else 0.0
    solver = SemilinearSolver(g_id, G1, L0, a_bound, smoothing)
    cache = {}

    def _x(t, mu, paths=None):
        v = mu.values if paths is None else paths
        return v[:, mu.grid.index_at(t), 0]

    def _solve(t, mu):
        tau = max(mu.grid.T - t, 0.0)
        key = (t, id(mu.values))
        hit = cache.get(key)
        if hit is not None and hit[0] is mu.values:
            return hit[1]
        out = (tau,) + solver.optimize(_x(t, mu), tau)
        cache.clear()
        cache[key] = (mu.values, out)
        return out

    def value(t, mu):
        return _solve(t, mu)[2]

    def dt(t, mu):
        tau, a, _ = _solve(t, mu)
        _, du, d2u = solver.u(_x(t, mu) + a * tau, tau)
        return float(np.mean(-0.5 * d2u - a * du)) + solver.b(a)

    def dmu(t, mu, paths=None):
        tau, a, _ = _solve(t, mu)
        return solver.u(_x(t, mu, paths) + a * tau, tau)[1][:, None]

    def dwdmu(t, mu, paths=None):
        tau, a, _ = _solve(t, mu)
        return solver.u(_x(t, mu, paths) + a * tau, tau)[2][:, None, None]

    def optimizer(t, mu):
        return _solve(t, mu)[1]

    def truncation(t, mu):
        wide = SemilinearSolver(g_id, G1, L0, 2 * a_bound, smoothing)
        tau = max(mu.grid.T - t, 0.0)
        return abs(wide.optimize(_x(t, mu), tau)[1] - value(t, mu))

    name = f"semilinear/{G1.name}/{g_id}"
    fn = MeasureFunctional(value, dt, dmu, dwdmu, name=name,
                           flags={"linear_growth": True, "envelope_derivatives": True})
    gen = semilinear_generator(G1.func, L0, G1.lip)
    return ReferenceEntry(name, fn, gen, fn,
                          note="constant-drift optimization; derivatives by the envelope theorem",
                          meta={"optimizer": optimizer, "truncation": truncation, "solver": solver,
                                "a_bound": a_bound, "L0": L0, "derived_derivatives": True})
