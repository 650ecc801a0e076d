"""Monte Carlo policy values and policy search."""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DomainError
from ..mckv_sim import simulate_trajectory
from ..rng import TAG_AUXILIARY, BrownianDriver

MIN_REPS = 8


@dataclass
class ValueEstimate:
    mean: float
    stderr: float
    reps: int
    values: np.ndarray = field(repr=False)
    policy: object = None
    params: dict = field(default_factory=dict)


def default_workers():
    try:
        return max(1, int(os.environ.get("PATHMASTER_THREADS", "1")))
    except ValueError:
        return 1


def realized_cost(traj, f, g):
    """``mean g(paths) + sum_k mean f(snap_k, a_k) dt`` on one simulated flow."""
    paths = traj.measure.values
    total = float(np.mean(g(paths))) if g is not None else 0.0
    if f is not None:
        dt = traj.grid.dt
        for j in range(traj.increments.shape[1]):
            k = traj.start + j
            a = None if traj.actions is None else traj.actions[:, j]
            total += float(np.mean(f(traj.snapshot(k), a))) * dt
    return total


def rep_value(t, mu, dyn, f, g, policy, N, seed, stream):
    traj = simulate_trajectory(t, mu, dyn, policy, N=N, seed=seed, stream=stream)
    return realized_cost(traj, f, g)


def evaluate_policy(t, mu, dyn, f, g, policy, N=None, seed=0, reps=MIN_REPS, workers=None,
                    stream_base=()):
    """Mean-field cost of ``policy`` over ``reps`` independent replications.

    Replication ``r`` simulates ``N`` particles on stream ``(*stream_base, r)``,
    so two policies evaluated with the same seed share their noise.  Results
    are merged in replication order whatever the thread count.
    """
    if reps < MIN_REPS:
        raise DomainError(f"at least {MIN_REPS} replications are required")
    workers = default_workers() if workers is None else workers

    def one(r):
        return rep_value(t, mu, dyn, f, g, policy, N, seed, (*stream_base, r))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            vals = np.array(list(pool.map(one, range(reps))))
    else:
        vals = np.array([one(r) for r in range(reps)])
    return ValueEstimate(float(np.mean(vals)), float(np.std(vals, ddof=1) / np.sqrt(reps)), reps,
                         vals, policy, {"t": t, "N": N or mu.N, "seed": seed, "reps": reps})


@dataclass
class SearchResult:
    policy: object
    estimate: ValueEstimate
    config: tuple
    evaluated: int
    exhaustive: bool
    table: list = field(default_factory=list, repr=False)


def optimize_value(t, mu, dyn, f, g, space, budget=200, seed=0, N=None, reps=MIN_REPS,
                   restarts=3, workers=None):
    """Best policy found in ``space`` (a lower bound on the supremum).

    Spaces no larger than ``budget`` are enumerated; otherwise coordinate
    ascent over table cells runs from ``restarts`` starting points until no
    single-cell change improves or the budget is spent.  All candidates use
    the same seed, and ties go to the lowest configuration index.
    """
    if len(space) == 0:
        raise ConfigurationError("empty policy space")
    cache = {}

    def value(cfg):
        if cfg not in cache:
            if len(cache) >= budget and cache:
                return None
            cache[cfg] = evaluate_policy(t, mu, dyn, f, g, space.policy(cfg), N, seed, reps, workers)
        return cache[cfg]

    def better(a, b):
        # strict improvement, then lexicographic order of configurations
        va, vb = cache[a].mean, cache[b].mean
        return va > vb or (va == vb and a < b)

    exhaustive = len(space) <= budget
    if exhaustive:
        best = None
        for cfg in space.all_configs():
            value(cfg)
            if best is None or better(cfg, best):
                best = cfg
    else:
        shape = space.shape
        rng = BrownianDriver(seed, (TAG_AUXILIARY,)).rng(TAG_AUXILIARY, 1)
        starts = [tuple(s // 2 for s in shape)]
        starts += [tuple(int(rng.integers(s)) for s in shape) for _ in range(max(restarts - 1, 0))]
        best = None
        for start in starts:
            if value(start) is None:
                break
            cur = start
            improved = True
            while improved:
                improved = False
                for pos, size in enumerate(shape):
                    for choice in range(size):
                        cand = cur[:pos] + (choice,) + cur[pos + 1:]
                        if value(cand) is None:
                            break
                        if better(cand, cur):
                            cur, improved = cand, True
            if best is None or better(cur, best):
                best = cur
    est = cache[best]
    table = sorted(((cfg, e.mean, e.stderr) for cfg, e in cache.items()), key=lambda r: r[0])
    return SearchResult(est.policy, est, best, len(cache), exhaustive, table)
