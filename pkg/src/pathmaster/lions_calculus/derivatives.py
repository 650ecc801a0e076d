"""Finite-difference derivatives on the space of path measures.

All bumps act on a single particle over ``[t, T]``: its values at every
grid point at or after the stopping index of ``t`` are shifted.  With
uniform weights the particle carries mass ``1/N``, hence the factor ``N``
in the difference quotients.
"""

import numpy as np

from ..errors import DomainError


def _scale(mu, i, t):
    k = mu.grid.index_at(t)
    return float(np.max(np.abs(mu.values[i, :k + 1])))


def default_eps(mu, i, t, base=1e-4):
    """``base * (1 + particle scale)``; the scale is the particle's sup norm up to t."""
    return base * (1.0 + _scale(mu, i, t))


def bumped(mu, i, shift, t):
    """Copy of ``mu`` with particle ``i`` shifted by ``shift`` (a d-vector) on [t, T]."""
    k = mu.grid.index_at(t)
    v = np.array(mu.values)
    v[i, k:, :] += np.asarray(shift, dtype=float)
    return mu.with_values(v)


def bumped_after(mu, i, shift, s):
    """Shift particle ``i`` strictly after time ``s`` (support in (s, T])."""
    k = mu.grid.index_at(s)
    v = np.array(mu.values)
    v[i, k + 1:, :] += np.asarray(shift, dtype=float)
    return mu.with_values(v)


def time_derivative(f, t, mu, h=None, richardson=True):
    """Right derivative of ``f`` along the stopped extension of ``mu``.

    Forward quotient ``(f(t+h, mu.stop(t)) - f(t, mu)) / h``; with
    ``richardson`` the quotients at ``h`` and ``h/2`` are combined as
    ``2 D(h/2) - D(h)``.  The default step is one grid spacing (capped by
    the remaining horizon).
    """
    grid = mu.grid
    if h is None:
        h = min(grid.dt, grid.T - t)
    if not h > 0:
        raise DomainError("h must be positive (and t < T)")
    if t + h > grid.T * (1 + 1e-12):
        raise DomainError("t + h exceeds the horizon")
    stopped = mu.stop(t)
    base = f(t, mu)

    def quotient(step):
        return (f(t + step, stopped) - base) / step
    d1 = quotient(h)
    if not richardson:
        return d1
    return 2.0 * quotient(h / 2) - d1


def lions_derivative(f, t, mu, i, eps=None):
    """Central single-atom difference quotient for the Lions derivative at particle ``i``."""
    if not 0 <= i < mu.N:
        raise DomainError(f"particle index {i} out of range")
    if eps is None:
        eps = default_eps(mu, i, t)
    if not eps > 0:
        raise DomainError("eps must be positive")
    out = np.zeros(mu.d)
    for k in range(mu.d):
        e = np.zeros(mu.d)
        e[k] = eps
        out[k] = mu.N * (f(t, bumped(mu, i, e, t)) - f(t, bumped(mu, i, -e, t))) / (2 * eps)
    return out


def second_pathwise_derivative(f, t, mu, i, eps1=None, eps2=None):
    """Mixed forward difference for the path derivative of the Lions derivative.

    Entry (k, l) is ``N [f(+eps1 e_k +eps2 e_l) - f(+eps1 e_k) - f(+eps2 e_l) + f] / (eps1 eps2)``.
    The quotient also picks up the second measure derivative at order 1/N;
    that contamination is accepted (see the N-doubling test).
    """
    if not 0 <= i < mu.N:
        raise DomainError(f"particle index {i} out of range")
    if eps1 is None:
        eps1 = default_eps(mu, i, t, base=1e-3)
    if eps2 is None:
        eps2 = eps1
    if not (eps1 > 0 and eps2 > 0):
        raise DomainError("eps1 and eps2 must be positive")
    d = mu.d
    f0 = f(t, mu)
    single1, single2 = [], []
    for k in range(d):
        e = np.zeros(d)
        e[k] = 1.0
        single1.append(f(t, bumped(mu, i, eps1 * e, t)))
        single2.append(f(t, bumped(mu, i, eps2 * e, t)))
    out = np.zeros((d, d))
    for k in range(d):
        for l in range(d):
            e = np.zeros(d)
            e[k] += eps1
            e[l] += eps2
            both = f(t, bumped(mu, i, e, t))
            out[k, l] = mu.N * (both - single1[k] - single2[l] + f0) / (eps1 * eps2)
    return out


def numeric_dmu(f, t, mu, eps=None):
    """Lions derivative at every particle, shape (N, d)."""
    return np.stack([lions_derivative(f, t, mu, i, eps) for i in range(mu.N)])


def numeric_dwdmu(f, t, mu, eps=None):
    """Second pathwise derivative at every particle, shape (N, d, d)."""
    return np.stack([second_pathwise_derivative(f, t, mu, i, eps, eps) for i in range(mu.N)])


def eps_sweep(f, t, mu, i, exact, eps_values, order=1):
    """Absolute errors of the first (``order=1``) or second derivative over ``eps_values``.

    Plotting the result against eps on log axes shows truncation error
    falling and round-off error rising; the minimum is the tuned eps.
    """
    exact = np.asarray(exact, dtype=float)
    errs = []
    for eps in eps_values:
        if order == 1:
            est = lions_derivative(f, t, mu, i, eps)
        else:
            est = second_pathwise_derivative(f, t, mu, i, eps, eps)
        errs.append(float(np.max(np.abs(est - exact))))
    errs = np.array(errs)
    return errs, float(np.asarray(eps_values)[int(np.argmin(errs))])
