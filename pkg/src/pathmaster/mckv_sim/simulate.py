"""Euler-Maruyama for interacting particle systems."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError, ShapeError, SimulationFault
from ..path_measure import PathMeasure
from ..rng import TAG_BOOTSTRAP, BrownianDriver
from .dynamics import Snapshot


@dataclass
class Trajectory:
    """Full output of one simulation.

    Arrays indexed by step run over ``k = start, ..., M-1`` (position
    ``k - start``): ``increments`` and ``drift`` are (N, steps, d),
    ``diffusion`` is sigma sigma^T of shape (N, steps, d, d), ``actions`` is
    (N, steps) or ``None``.
    """

    measure: PathMeasure
    start: int
    increments: np.ndarray
    drift: np.ndarray
    diffusion: np.ndarray
    actions: np.ndarray = None
    audit: dict = field(default_factory=dict)

    @property
    def grid(self):
        return self.measure.grid

    @property
    def noise(self):
        """Martingale part sigma dW of each increment."""
        return self.increments - self.drift * self.grid.dt

    def snapshot(self, k):
        return Snapshot(self.grid.time(k), k, self.grid.dt, self.measure.values[:, :k + 1])


def _initial_paths(t, mu, N, driver):
    k0 = mu.grid.index_at(t)
    if N is None or N == mu.N:
        idx = np.arange(mu.N)
    else:
        if N < 1:
            raise DomainError("particle count must be positive")
        idx = driver.rng(TAG_BOOTSTRAP).integers(0, mu.N, size=N)
    return k0, idx


def simulate_trajectory(t, mu, dyn, policy=None, N=None, seed=0, stream=0, horizon=None):
    """Simulate from time ``t`` to ``horizon`` (default ``T``) starting from ``mu``.

    The initial segment on ``[0, t]`` is copied from ``mu`` (bootstrap
    resampled with replacement if ``N`` differs from ``mu.N``).  After the
    horizon, particles are frozen and no steps are recorded.
    """
    if mu.d != dyn.d:
        raise ShapeError(f"measure has d={mu.d} but dynamics expect d={dyn.d}")
    grid = mu.grid
    driver = BrownianDriver(seed, stream)
    k0, idx = _initial_paths(t, mu, N, driver)
    n, d, M, dt = len(idx), mu.d, grid.M, grid.dt
    k_end = M if horizon is None else grid.index_at(horizon)
    steps = k_end - k0

    paths = np.empty((n, M + 1, d))
    paths[:, :k0 + 1] = mu.values[idx, :k0 + 1]
    incr = np.zeros((n, steps, d))
    drift = np.zeros((n, steps, d))
    diff = np.zeros((n, steps, d, d))
    acts = None
    if policy is not None:
        acts = np.zeros((n, steps))
        decisions = dict(policy.decision_indices(grid, k0))
    current = None
    view = paths.view()
    view.flags.writeable = False

    for k in range(k0, k_end):
        snap = Snapshot(grid.time(k), k, dt, view[:, :k + 1])
        if policy is not None:
            if k in decisions:
                current = np.asarray(policy.decide(decisions[k], snap), dtype=float)
                current = np.broadcast_to(current, (n,))
                if dyn.actions is not None:
                    dyn.actions.check(current)
            acts[:, k - k0] = current
        b, s = dyn.coefficients(snap, current)
        dw = driver.increments(k, n, d, dt)
        dx = b * dt + np.einsum("nij,nj->ni", s, dw)
        if not np.all(np.isfinite(dx)):
            raise SimulationFault(f"non-finite state at step {k}", step=k)
        paths[:, k + 1] = paths[:, k] + dx
        incr[:, k - k0] = dx
        drift[:, k - k0] = b
        diff[:, k - k0] = np.einsum("nij,nkj->nik", s, s)
    if k_end < M:
        paths[:, k_end + 1:] = paths[:, k_end:k_end + 1]

    paths.flags.writeable = False
    measure = PathMeasure(grid, paths)
    audit = dict(getattr(dyn, "meta", {}).get("audit", {}))
    return Trajectory(measure, k0, incr, drift, diff, acts, audit)


def simulate_mkv(t, mu, dyn, policy=None, N=None, seed=0, stream=0):
    """Empirical law of the controlled particle system on ``[0, T]``."""
    return simulate_trajectory(t, mu, dyn, policy, N, seed, stream).measure
