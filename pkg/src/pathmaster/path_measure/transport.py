"""Quadratic optimal transport between empirical path measures.

The ground cost is the squared sup-norm distance over grid points.  Small
problems are solved exactly as linear assignment problems; larger ones fall
back to a log-domain Sinkhorn iteration whose plan epsilon-attains the cost.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.special import logsumexp

from ..errors import DomainError, ShapeError, UnsupportedError

N_EXACT = 256
ENTROPIC_SCALE = 1e-3


@dataclass(frozen=True)
class Coupling:
    """Transport plan between two measures.

    Exactly one of ``permutation`` (right index paired with left particle i)
    and ``plan`` (N x N doubly stochastic matrix with total mass one) is set.
    """

    left: object
    right: object
    permutation: np.ndarray = None
    plan: np.ndarray = None
    method: str = "exact"

    def as_plan(self):
        if self.plan is not None:
            return self.plan
        n = len(self.permutation)
        p = np.zeros((n, n))
        p[np.arange(n), self.permutation] = 1.0 / n
        return p


def sup_cost_matrix(a, b):
    """Squared sup-norm distances between particle sets of shape (N, K, d)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cost = np.zeros((a.shape[0], b.shape[0]))
    for k in range(a.shape[1]):
        diff = a[:, None, k, :] - b[None, :, k, :]
        np.maximum(cost, np.einsum("ijd,ijd->ij", diff, diff), out=cost)
    return cost


def _check_pair(mu, nu):
    if mu.N < 1 or nu.N < 1:
        raise DomainError("empty measure")
    if mu.grid != nu.grid or mu.d != nu.d:
        raise ShapeError("measures live on different grids or dimensions")
    if mu.N != nu.N:
        raise UnsupportedError("unequal particle counts; resample to a common N first")


def assignment(cost):
    """Optimal permutation and its mean cost for a square cost matrix."""
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(rows), dtype=int)
    perm[rows] = cols
    # fsum makes the total independent of summation order, so swapping the
    # two measures gives a bit-identical value
    total = math.fsum(cost[rows, cols].tolist())
    return perm, total / len(rows)


def round_plan(plan, a, b):
    """Project an approximate plan onto the couplings of ``a`` and ``b``.

    Rows and columns are scaled down where they exceed their marginal, and
    the leftover mass is added as a rank-one correction, so the marginals
    hold to rounding error while the plan moves by at most the violation.
    """
    p = plan * np.minimum(a / np.maximum(plan.sum(axis=1), 1e-300), 1.0)[:, None]
    p = p * np.minimum(b / np.maximum(p.sum(axis=0), 1e-300), 1.0)[None, :]
    ra, rb = a - p.sum(axis=1), b - p.sum(axis=0)
    mass = ra.sum()
    return p + np.outer(ra, rb) / mass if mass > 0 else p


def sinkhorn(cost, reg, tol=1e-10, max_iter=5000):
    """Entropic plan for uniform marginals, computed in the log domain.

    The regularization is annealed from the largest cost down to ``reg``
    (halving, potentials carried over), and the final plan is rounded onto
    the exact marginals, so a truncated iteration still returns a coupling.
    """
    n, m = cost.shape
    log_a = np.full(n, -np.log(n))
    log_b = np.full(m, -np.log(m))
    f = np.zeros(n)
    g = np.zeros(m)
    top = max(float(np.max(cost)), reg)
    schedule = [reg * 2.0 ** j for j in range(int(np.ceil(np.log2(top / reg))), 0, -1)] + [reg]
    for eps in schedule:
        last = eps == reg
        k = -cost / eps
        for _ in range(max_iter if last else 200):
            f = eps * (log_a - logsumexp(k + g[None, :] / eps, axis=1))
            g = eps * (log_b - logsumexp(k + f[:, None] / eps, axis=0))
            log_p = k + f[:, None] / eps + g[None, :] / eps
            err = np.abs(np.exp(logsumexp(log_p, axis=1)) - np.exp(log_a)).sum()
            if err < (tol if last else 1e-6):
                break
    plan = np.exp(-cost / reg + f[:, None] / reg + g[None, :] / reg)
    return round_plan(plan, np.exp(log_a), np.exp(log_b))


def wasserstein2(mu, nu, n_exact=N_EXACT, entropic_scale=ENTROPIC_SCALE):
    """2-Wasserstein distance under the sup-norm ground cost.

    Returns
    -------
    cost : float
        The distance (square root of the optimal mean squared cost).
    coupling : Coupling
        Permutation for the exact solver, plan for the entropic one.
    """
    _check_pair(mu, nu)
    c = sup_cost_matrix(mu.values, nu.values)
    if mu.N <= n_exact:
        perm, val = assignment(c)
        return math.sqrt(max(val, 0.0)), Coupling(mu, nu, permutation=perm, method="exact")
    med = float(np.median(c))
    reg = entropic_scale * (med if med > 0 else 1.0)
    plan = sinkhorn(c, reg)
    val = math.fsum((plan * c).ravel().tolist())
    return math.sqrt(max(val, 0.0)), Coupling(mu, nu, plan=plan, method="entropic")


def theta_distance(t, mu, t2, nu, **kw):
    """sqrt(|t - t2| + W2(mu stopped at t, nu stopped at t2)^2)."""
    mu.grid.check_time(t)
    nu.grid.check_time(t2)
    w, _ = wasserstein2(mu.stop(t), nu.stop(t2), **kw)
    return math.sqrt(abs(t - t2) + w * w)
