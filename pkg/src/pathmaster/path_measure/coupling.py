"""Quantile transport and the constrained coupling construction.

``build_coupling`` pairs the particles of two measures so that the left
particle's values on a finite set of observation times are a deterministic
function of the right particle's values there and of an independent
Brownian increment.  Right-hand particles are grouped into cubes of
diameter below ``eps / 2``; inside a cube the left atoms assigned by an
optimal coupling are dealt out in the order of a uniform variable read off
the auxiliary increment.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from ..errors import DomainError, ShapeError, UnsupportedError
from ..rng import TAG_AUXILIARY, BrownianDriver
from .transport import assignment, sup_cost_matrix


class QuantileMap:
    """phi = F_target^{-1} o F_samples, nondecreasing.

    ``F_samples`` is the mid-distribution function of the samples, so tied
    samples share one quantile level and distinct samples sit at
    ``(rank + 1/2) / N``.
    """

    def __init__(self, samples, inverse_cdf):
        s = np.sort(np.asarray(samples, dtype=float).ravel())
        if s.size == 0:
            raise DomainError("no samples")
        self.samples = s
        self._inverse = inverse_cdf

    def levels(self, x):
        x = np.asarray(x, dtype=float)
        n = self.samples.size
        lo = np.searchsorted(self.samples, x, side="left")
        hi = np.searchsorted(self.samples, x, side="right")
        u = (lo + 0.5 * (hi - lo)) / n
        return np.clip(u, 0.5 / n, 1 - 0.5 / n)

    def __call__(self, x):
        return self._inverse(self.levels(x))


def _empirical_inverse(target):
    t = np.sort(np.asarray(target, dtype=float).ravel())
    n = t.size

    def inv(u):
        idx = np.ceil(np.asarray(u) * n).astype(int) - 1
        return t[np.clip(idx, 0, n - 1)]
    return inv


def _callable_inverse(cdf, probe=2049, iters=200):
    lo, hi = -1.0, 1.0
    for _ in range(64):
        if cdf(lo) <= 1e-12 and cdf(hi) >= 1 - 1e-12:
            break
        lo, hi = 2 * lo, 2 * hi
    grid = np.linspace(lo, hi, probe)
    vals = np.array([float(cdf(x)) for x in grid])
    if np.any(np.diff(vals) < -1e-12) or vals.min() < -1e-12 or vals.max() > 1 + 1e-12:
        raise DomainError("target_cdf is not a monotone distribution function")
    vcdf = np.vectorize(lambda x: float(cdf(x)))

    def inv(u):
        u = np.asarray(u, dtype=float)
        a = np.full(u.shape, lo)
        b = np.full(u.shape, hi)
        # invariant: F(a) < u <= F(b); returns inf{x : F(x) >= u}
        for _ in range(iters):
            m = 0.5 * (a + b)
            ok = vcdf(m) >= u
            b = np.where(ok, m, b)
            a = np.where(ok, a, m)
            if np.all(b - a <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(b))):
                break
        return b
    return inv


def quantile_transport(samples, target):
    """Monotone map pushing the empirical law of ``samples`` onto ``target``.

    ``target`` is either a distribution function (callable) or an array of
    target samples, whose empirical law is then used.
    """
    if callable(target):
        inv = _callable_inverse(target)
    else:
        inv = _empirical_inverse(target)
    return QuantileMap(samples, inv)


@dataclass
class CoupledSystem:
    """Output of ``build_coupling``.

    ``xi`` and ``eta`` are aligned path measures (row ``j`` of each forms a
    pair); ``btilde`` holds the auxiliary increments of shape (N, n_sub, d)
    on ``[0, delta]``.  ``xi_index[j]`` is the left particle used for pair j.
    """

    xi: object
    eta: object
    btilde: np.ndarray
    xi_index: np.ndarray
    pi_index: np.ndarray
    eps: float
    delta: float
    cell_side: float
    distance: float
    optimal_distance: float
    lookup: dict = field(repr=False, default_factory=dict)

    def cell_keys(self, eta_pi):
        flat = np.asarray(eta_pi, dtype=float).reshape(len(eta_pi), -1)
        return [tuple(r) for r in np.floor(flat / self.cell_side).astype(np.int64)]

    def uniforms(self, btilde):
        h = self.delta / btilde.shape[1]
        return ndtr(btilde[:, 0, 0] / np.sqrt(h))

    def reconstruct(self, eta_pi, btilde):
        """Re-derive the left values on the observation times from (eta, B~) alone."""
        keys = self.cell_keys(eta_pi)
        u = self.uniforms(np.asarray(btilde))
        out = []
        for j, key in enumerate(keys):
            breaks, atoms = self.lookup[key]
            r = int(np.searchsorted(breaks, u[j], side="left"))
            out.append(atoms[min(r, len(atoms) - 1)])
        return np.stack(out)


def build_coupling(mu, nu, pi_times, eps, delta, seed, n_sub=8):
    """Couple ``mu`` to ``nu`` on the observation times ``pi_times``.

    Returns a ``CoupledSystem`` with (a) the empirical law of ``xi`` equal
    to ``mu`` and that of ``eta`` equal to ``nu``; (b) ``xi`` on
    ``pi_times`` a function of ``eta`` on ``pi_times`` and the auxiliary
    increments (see ``CoupledSystem.reconstruct``); (c) the root mean
    squared max-distance over ``pi_times`` at most the optimal value plus
    ``eps / 2``.
    """
    if not eps > 0:
        raise DomainError("eps must be positive")
    if not delta > 0:
        raise DomainError("delta must be positive")
    if mu.grid != nu.grid or mu.d != nu.d:
        raise ShapeError("measures live on different grids or dimensions")
    if mu.N != nu.N:
        raise UnsupportedError("unequal particle counts; resample to a common N first")
    n, d = mu.N, mu.d
    pi_index = np.array([mu.grid.index_at(s) for s in np.atleast_1d(pi_times)], dtype=int)
    x = mu.values[:, pi_index, :]
    y = nu.values[:, pi_index, :]

    cost = sup_cost_matrix(x, y)
    perm, opt = assignment(cost)
    matched_left = np.empty(n, dtype=int)
    matched_left[perm] = np.arange(n)

    # cubes of side h have Euclidean diameter h*sqrt(d) < eps/2 per time point
    side = eps / (2.0 * np.sqrt(d)) * (1 - 1e-12)
    driver = BrownianDriver(seed, stream=(TAG_AUXILIARY,))
    h = delta / n_sub
    btilde = np.stack([driver.increments(k, n, d, h) for k in range(n_sub)], axis=1)
    u = ndtr(btilde[:, 0, 0] / np.sqrt(h))

    system = CoupledSystem(xi=None, eta=nu, btilde=btilde, xi_index=None, pi_index=pi_index,
                           eps=float(eps), delta=float(delta), cell_side=side,
                           distance=np.nan, optimal_distance=float(np.sqrt(opt)))
    keys = system.cell_keys(y)
    groups = {}
    for j, key in enumerate(keys):
        groups.setdefault(key, []).append(j)

    xi_index = np.empty(n, dtype=int)
    for key, members in groups.items():
        members = np.array(members)
        order = members[np.argsort(u[members], kind="stable")]
        atoms = matched_left[members]
        # deal atoms in lexicographic order of their observed values
        atoms = atoms[np.lexsort(x[atoms].reshape(len(atoms), -1).T[::-1])]
        xi_index[order] = atoms
        system.lookup[key] = (u[order], x[atoms].copy())

    system.xi_index = xi_index
    system.xi = mu.subset(xi_index)
    gap = np.max(np.sum((x[xi_index] - y) ** 2, axis=2), axis=1)
    system.distance = float(np.sqrt(gap.mean()))
    return system
