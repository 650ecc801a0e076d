"""Time grids, sampled paths and uniform-weight empirical path measures."""

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, ShapeError

# slack used when rounding a time down to the grid, so that 0.3 with
# spacing 0.1 lands on index 3 rather than 2
_ROUND_TOL = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``0, dt, ..., T`` with ``M`` steps."""

    T: float
    M: int

    def __post_init__(self):
        if not (np.isfinite(self.T) and self.T > 0):
            raise DomainError(f"horizon must be positive, got {self.T}")
        if int(self.M) != self.M or self.M < 1:
            raise DomainError(f"steps must be a positive integer, got {self.M}")
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "M", int(self.M))

    @property
    def dt(self):
        return self.T / self.M

    @property
    def times(self):
        return np.arange(self.M + 1) * self.dt

    def time(self, k):
        return k * self.dt

    def check_time(self, t):
        if not (-_ROUND_TOL * self.T <= t <= self.T * (1 + _ROUND_TOL)):
            raise DomainError(f"time {t} outside [0, {self.T}]")

    def index_at(self, t):
        """Greatest grid index whose time is at or below ``t``."""
        self.check_time(t)
        k = int(np.floor(t / self.dt + _ROUND_TOL))
        return min(max(k, 0), self.M)

    def is_grid_time(self, t):
        k = self.index_at(t)
        return abs(k * self.dt - t) <= _ROUND_TOL * max(1.0, self.T)


def _freeze(a):
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


class SamplePath:
    """One ``d``-dimensional path sampled on a grid; ``values`` has shape (M+1, d)."""

    __slots__ = ("grid", "values")

    def __init__(self, grid, values):
        v = np.asarray(values, dtype=float)
        if v.ndim == 1:
            v = v[:, None]
        if v.ndim != 2 or v.shape[0] != grid.M + 1:
            raise ShapeError(f"path needs {grid.M + 1} rows, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise DomainError("path values must be finite")
        self.grid = grid
        self.values = _freeze(v)

    @property
    def d(self):
        return self.values.shape[1]

    def __eq__(self, other):
        return (isinstance(other, SamplePath) and self.grid == other.grid
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"SamplePath(M={self.grid.M}, d={self.d})"


def stop_path(p, t):
    """Path equal to ``p`` up to the grid point at or below ``t``, constant afterwards."""
    k = p.grid.index_at(t)
    v = p.values.copy()
    v[k + 1:] = v[k]
    return SamplePath(p.grid, v)


def path_sup_distance(p, q):
    """Maximum over grid points of the Euclidean distance between two paths."""
    if p.grid != q.grid or p.values.shape != q.values.shape:
        raise ShapeError("paths live on different grids or dimensions")
    return float(np.sqrt(np.max(np.sum((p.values - q.values) ** 2, axis=1))))


class PathMeasure:
    """Empirical measure of ``N`` equally weighted paths.

    ``values`` has shape (N, M+1, d) and is read-only, so a measure can be
    shared between threads and used as a dictionary of snapshots without
    defensive copies.
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid, values):
        v = np.asarray(values, dtype=float)
        if v.ndim == 2:
            v = v[:, :, None]
        if v.ndim != 3:
            raise ShapeError(f"expected (N, M+1, d) values, got shape {v.shape}")
        if v.shape[0] < 1:
            raise DomainError("a path measure needs at least one particle")
        if v.shape[1] != grid.M + 1:
            raise ShapeError(f"particles need {grid.M + 1} grid values, got {v.shape[1]}")
        if not np.all(np.isfinite(v)):
            raise DomainError("particle values must be finite")
        self.grid = grid
        self.values = v if not v.flags.writeable and v.dtype == float else _freeze(v)

    @classmethod
    def from_paths(cls, paths):
        paths = list(paths)
        if not paths:
            raise DomainError("a path measure needs at least one particle")
        grid = paths[0].grid
        if any(p.grid != grid for p in paths):
            raise ShapeError("all particles must share one grid")
        return cls(grid, np.stack([p.values for p in paths]))

    @classmethod
    def constant(cls, grid, points):
        """Particles frozen at the given points (shape (N,) or (N, d))."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        return cls(grid, np.repeat(pts[:, None, :], grid.M + 1, axis=1))

    @property
    def N(self):
        return self.values.shape[0]

    @property
    def d(self):
        return self.values.shape[2]

    def particle(self, i):
        return SamplePath(self.grid, self.values[i])

    def __len__(self):
        return self.N

    def marginal(self, t):
        """Particle states at the grid point at or below ``t``, shape (N, d)."""
        return self.values[:, self.grid.index_at(t)]

    def stop(self, t):
        """The stopped measure: every particle frozen after the grid point at or below ``t``."""
        k = self.grid.index_at(t)
        if k == self.grid.M:
            return self
        v = np.empty_like(self.values)
        v[:, :k + 1] = self.values[:, :k + 1]
        v[:, k + 1:] = self.values[:, k:k + 1]
        v.flags.writeable = False
        return PathMeasure(self.grid, v)

    def subset(self, idx):
        return PathMeasure(self.grid, self.values[np.asarray(idx)])

    def with_values(self, values):
        return PathMeasure(self.grid, values)

    def __eq__(self, other):
        return (isinstance(other, PathMeasure) and self.grid == other.grid
                and np.array_equal(self.values, other.values))

    def __repr__(self):
        return f"PathMeasure(N={self.N}, M={self.grid.M}, d={self.d}, T={self.grid.T})"
