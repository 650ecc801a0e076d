"""Piecewise-constant closed-loop policies with quantized feedback.

A policy fixes decision times t_0 < ... < t_{n-1} (the last interval runs to
T).  At t_i feedback h_i reads the particle histories up to t_i and returns
one scalar action per particle, held until the next decision time.
"""

import itertools

import numpy as np

from ..errors import ConfigurationError, DomainError

MAX_OBS = 4
MAX_BINS = 9
MAX_ACTIONS = 9


class ConstantFeedback:
    def __init__(self, action):
        self.action = float(action)

    def __call__(self, snap):
        return np.full(snap.N, self.action)

    def __repr__(self):
        return f"Constant({self.action:g})"


class FunctionFeedback:
    """Arbitrary feedback ``func(snap) -> (N,)`` actions."""

    def __init__(self, func, name="feedback"):
        self.func = func
        self.name = name

    def __call__(self, snap):
        return np.asarray(self.func(snap), dtype=float)

    def __repr__(self):
        return f"Function({self.name})"


class TableFeedback:
    """Action looked up from binned path values.

    Features are ``X_o`` (component 0) at each observation time ``o``, or
    ``X_o - X_ref`` when ``relative_to=ref`` is given; a feature is binned
    with ``np.digitize(x, edges, right=True)``, so a value equal to an edge
    falls in the lower bin.  ``table`` has one axis per observation time.
    """

    def __init__(self, obs_times, edges, table, relative_to=None):
        self.obs_times = tuple(float(o) for o in obs_times)
        self.edges = np.asarray(edges, dtype=float)
        self.table = np.asarray(table, dtype=float)
        self.relative_to = None if relative_to is None else float(relative_to)
        nb = len(self.edges) + 1
        if len(self.obs_times) > MAX_OBS:
            raise ConfigurationError(f"at most {MAX_OBS} observation times")
        if nb > MAX_BINS:
            raise ConfigurationError(f"at most {MAX_BINS} bins")
        if self.table.shape != (nb,) * len(self.obs_times):
            raise ConfigurationError(f"table shape {self.table.shape} does not match "
                                     f"{len(self.obs_times)} observations with {nb} bins")

    def cells(self, snap):
        grid_dt = snap.dt
        if any(o > snap.t + 1e-9 for o in self.obs_times):
            raise DomainError("feedback observes a time after the decision time")
        ks = [int(np.floor(o / grid_dt + 1e-9)) for o in self.obs_times]
        feats = [snap.paths[:, k, 0] for k in ks]
        if self.relative_to is not None:
            ref = snap.paths[:, int(np.floor(self.relative_to / grid_dt + 1e-9)), 0]
            feats = [x - ref for x in feats]
        return tuple(np.digitize(x, self.edges, right=True) for x in feats)

    def __call__(self, snap):
        if not self.obs_times:
            return np.full(snap.N, float(self.table))
        return self.table[self.cells(snap)]

    def __repr__(self):
        return f"Table(obs={self.obs_times}, rel={self.relative_to}, {self.table.ravel().tolist()})"


class PiecewisePolicy:
    """Feedbacks applied on successive intervals; duck-typed for the simulator."""

    def __init__(self, breakpoints, feedbacks, actions=None):
        self.breakpoints = tuple(float(b) for b in breakpoints)
        self.feedbacks = list(feedbacks)
        if len(self.breakpoints) != len(self.feedbacks) or not self.feedbacks:
            raise ConfigurationError("one feedback per decision time is required")
        if any(b2 <= b1 for b1, b2 in zip(self.breakpoints, self.breakpoints[1:])):
            raise ConfigurationError("decision times must increase")
        self.actions = actions

    def decision_indices(self, grid, k0):
        out = []
        for i, b in enumerate(self.breakpoints):
            if not grid.is_grid_time(b):
                raise DomainError(f"decision time {b} is not a grid time")
            k = grid.index_at(b)
            if k < k0:
                raise DomainError("policy starts before the simulation start")
            out.append((k, i))
        if out[0][0] != k0:
            raise DomainError("first decision time must equal the start time")
        return out

    def decide(self, i, snap):
        a = self.feedbacks[i](snap)
        if self.actions is not None:
            self.actions.check(a)
        return a

    def __repr__(self):
        return f"Policy({list(zip(self.breakpoints, self.feedbacks))})"


def interpolate_observed(paths, grid, pi_times):
    """Replace each history by the linear interpolation through its values at ``pi_times``.

    ``paths`` is (n, k+1, d) up to grid index k; the end points 0 and t_k are
    always included.
    """
    k = paths.shape[1] - 1
    t = grid.time(k)
    knots = sorted({0.0, t, *[p for p in pi_times if p <= t + 1e-12]})
    kidx = [grid.index_at(p) for p in knots]
    times = grid.times[:k + 1]
    kt = np.array([grid.time(j) for j in kidx])
    pos = np.clip(np.searchsorted(kt, times, side="right") - 1, 0, max(len(kt) - 2, 0))
    if len(kt) == 1:
        return np.repeat(paths[:, kidx[0]:kidx[0] + 1], k + 1, axis=1)
    left, right = np.array(kidx)[pos], np.array(kidx)[pos + 1]
    w = ((times - kt[pos]) / (kt[pos + 1] - kt[pos]))[None, :, None]
    return (1 - w) * paths[:, left] + w * paths[:, right]


class DiscretePathPolicy(PiecewisePolicy):
    """Policy whose feedbacks see only the linear interpolation of the path through ``pi_times``.

    ``path_feedbacks[i](paths, grid)`` maps (n, k+1, d) histories to actions.
    With ``pi_times=None`` the feedbacks see the full grid history.
    """

    def __init__(self, breakpoints, path_feedbacks, pi_times=None, grid=None, actions=None):
        self.pi_times = None if pi_times is None else tuple(float(p) for p in pi_times)
        self.grid = grid

        def wrap(F):
            def fb(snap):
                paths = snap.paths
                if self.pi_times is not None:
                    paths = interpolate_observed(paths, self.grid, self.pi_times)
                return np.asarray(F(paths, self.grid), dtype=float)
            return FunctionFeedback(fb, getattr(F, "__name__", "path_feedback"))
        super().__init__(breakpoints, [wrap(F) for F in path_feedbacks], actions)


class EnumeratedSpace:
    """A finite list of policies."""

    def __init__(self, policies):
        self.policies = list(policies)
        if not self.policies:
            raise ConfigurationError("empty policy space")

    def __len__(self):
        return len(self.policies)

    @property
    def shape(self):
        return (len(self.policies),)

    def policy(self, config):
        return self.policies[config[0]]

    def all_configs(self):
        return ((i,) for i in range(len(self.policies)))


class TableSpace:
    """All policies whose interval feedbacks are tables over fixed features.

    ``intervals`` is a list of ``(start, obs_times, relative_to)``; every
    table cell independently takes any of ``actions``.  A configuration is
    a tuple of action indices, one per cell, intervals in order.
    """

    def __init__(self, intervals, edges, actions):
        self.intervals = [(float(s), tuple(o), r) for s, o, r in intervals]
        self.edges = np.asarray(edges, dtype=float)
        self.actions = np.asarray(actions, dtype=float).ravel()
        if self.actions.size == 0 or not self.intervals:
            raise ConfigurationError("empty policy space")
        if self.actions.size > MAX_ACTIONS:
            raise ConfigurationError(f"at most {MAX_ACTIONS} actions")
        nb = len(self.edges) + 1
        self._cells = [nb ** len(o) for _, o, _ in self.intervals]

    @property
    def n_cells(self):
        return sum(self._cells)

    @property
    def shape(self):
        return (self.actions.size,) * self.n_cells

    def __len__(self):
        return self.actions.size ** self.n_cells

    def policy(self, config):
        config = tuple(config)
        if len(config) != self.n_cells:
            raise ConfigurationError("configuration length does not match the cell count")
        nb = len(self.edges) + 1
        feedbacks, pos = [], 0
        for (start, obs, rel), n in zip(self.intervals, self._cells):
            vals = self.actions[list(config[pos:pos + n])]
            table = vals.reshape((nb,) * len(obs)) if obs else vals[0]
            feedbacks.append(TableFeedback(obs, self.edges, table, rel))
            pos += n
        return PiecewisePolicy([s for s, _, _ in self.intervals], feedbacks)

    def all_configs(self):
        return itertools.product(range(self.actions.size), repeat=self.n_cells)
