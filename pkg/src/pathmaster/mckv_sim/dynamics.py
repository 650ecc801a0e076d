"""Coefficient containers for controlled McKean-Vlasov dynamics.

Coefficients are vectorized over particles.  At step ``k`` they receive a
``Snapshot`` whose ``paths`` array holds every particle's history up to and
including grid index ``k`` (shape (N, k+1, d), read-only).  Since the
particle cloud is the empirical measure, the same array carries the
measure-so-far; nothing beyond index ``k`` is ever exposed.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, DomainError


@dataclass(frozen=True)
class Snapshot:
    t: float
    k: int
    dt: float
    paths: np.ndarray

    @property
    def state(self):
        return self.paths[:, -1, :]

    @property
    def N(self):
        return self.paths.shape[0]

    @property
    def d(self):
        return self.paths.shape[2]


class ActionSet:
    """Scalar actions: a finite list, or an interval carrying a search grid."""

    def __init__(self, values, low=None, high=None):
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0:
            raise ConfigurationError("empty action set")
        self.values = v
        self.low = None if low is None else float(low)
        self.high = None if high is None else float(high)

    @classmethod
    def finite(cls, values):
        return cls(values)

    @classmethod
    def interval(cls, low, high, n=9):
        return cls(np.linspace(low, high, n), low, high)

    @property
    def is_interval(self):
        return self.low is not None

    def __len__(self):
        return self.values.size

    def contains(self, a, tol=1e-12):
        a = np.asarray(a, dtype=float)
        if self.is_interval:
            return (a >= self.low - tol) & (a <= self.high + tol)
        return np.min(np.abs(a[..., None] - self.values), axis=-1) <= tol

    def check(self, a):
        if not np.all(self.contains(a)):
            bad = np.asarray(a)[~self.contains(a)]
            raise DomainError(f"action {bad.ravel()[0]} outside the action set")

    def __repr__(self):
        if self.is_interval:
            return f"ActionSet([{self.low}, {self.high}], grid={self.values.size})"
        return f"ActionSet({self.values.tolist()})"


def as_vol_matrix(s, n, d):
    """Normalize a volatility evaluation to shape (n, d, d).

    Accepted: a scalar or an (n,) array (times the identity), an (n, d)
    array (diagonal), or anything broadcastable to (n, d, d).
    """
    s = np.asarray(s, dtype=float)
    eye = np.eye(d)
    if s.ndim == 0:
        return np.broadcast_to(s * eye, (n, d, d))
    if s.ndim == 1 and s.shape[0] == n:
        return s[:, None, None] * eye
    if s.ndim == 2 and s.shape == (n, d):
        return s[:, :, None] * eye
    return np.broadcast_to(s, (n, d, d))


def as_drift(b, n, d):
    b = np.asarray(b, dtype=float)
    if b.ndim <= 1:
        b = b.reshape(-1, 1) if d == 1 else b.reshape(1, d)
    return np.broadcast_to(b, (n, d))


@dataclass(frozen=True)
class DynamicsSpec:
    """Drift and volatility of a controlled particle system.

    ``drift(snap, a)`` returns (N, d); ``vol(snap, a)`` returns anything
    ``as_vol_matrix`` accepts.  ``a`` is the (N,) array of current actions,
    or ``None`` for uncontrolled dynamics.
    """

    drift: object
    vol: object
    d: int = 1
    L: float = 1.0
    actions: ActionSet = None
    C0: float = np.inf
    name: str = "dynamics"
    meta: dict = field(default_factory=dict, compare=False)

    def coefficients(self, snap, a=None):
        n = snap.N
        return as_drift(self.drift(snap, a), n, self.d), as_vol_matrix(self.vol(snap, a), n, self.d)


def constant_dynamics(b=0.0, s=1.0, d=1, name=None):
    """Uncontrolled dynamics with constant drift vector and scalar volatility."""
    bv = np.broadcast_to(np.asarray(b, dtype=float), (d,)).copy()
    return DynamicsSpec(drift=lambda snap, a: np.broadcast_to(bv, (snap.N, d)),
                        vol=lambda snap, a: np.full(snap.N, float(s)),
                        d=d, L=max(float(np.linalg.norm(bv)), 0.5 * s * s * d),
                        C0=float(np.linalg.norm(bv)) + abs(s),
                        name=name or f"constant(b={b},s={s})")
