"""Sampling L-bounded semimartingale laws that agree with a given measure up to t.

The generator family is finite and documented below.  It is a
falsification family for the viscosity checks, not a cover of all
L-bounded laws.

=================  ==========================================================
member             coefficients on [t, horizon]
=================  ==========================================================
``frozen``         drift 0, vol 0
``constant``       drift uniform in the L-ball, scalar vol uniform in range
``extreme``        drift +-L along a random axis, vol 0 or the maximal level
``piecewise``      2 to 4 time pieces, each an independent ``constant`` draw
``sign_feedback``  drift +-L sign(X_s - X_t), random constant vol
``threshold``      maximal vol while |X_s - X_t| < r, else 0; constant drift
``state_split``    drift +-L by the side of X_t relative to the median of X_t
=================  ==========================================================

The maximal vol level is sqrt(2L/d) times the identity, so that half the
squared Frobenius norm equals L.
"""

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..rng import TAG_SAMPLER, BrownianDriver
from .dynamics import DynamicsSpec
from .simulate import simulate_trajectory

FAMILIES = {
    "zero": ("frozen",),
    "drift_pm": ("drift_pm",),
    "unit_vol": ("unit_vol",),
    "extreme": ("extreme",),
    "default": ("frozen", "constant", "extreme", "piecewise", "sign_feedback", "threshold",
                "state_split"),
}


class SemimartingaleSpec:
    """Drift and vol processes clamped to ``|b| <= L`` and ``|sigma|^2 / 2 <= L``.

    Raw evaluations that exceed the bounds are rescaled onto them and
    counted in ``audit["clamped"]``.
    """

    def __init__(self, drift, vol, L, d=1, name="semimartingale"):
        if not L > 0:
            raise DomainError("L must be positive")
        self.raw_drift = drift
        self.raw_vol = vol
        self.L = float(L)
        self.d = d
        self.name = name
        self.audit = {"clamped": 0, "evaluations": 0}

    def drift(self, snap, a=None):
        b = np.asarray(self.raw_drift(snap), dtype=float).reshape(snap.N, self.d)
        norm = np.linalg.norm(b, axis=1)
        over = norm > self.L * (1 + 1e-12)
        self.audit["evaluations"] += 1
        if np.any(over):
            self.audit["clamped"] += int(over.sum())
            b = b.copy()
            b[over] *= (self.L / norm[over])[:, None]
        return b

    def vol(self, snap, a=None):
        s = np.asarray(self.raw_vol(snap), dtype=float)
        s = np.broadcast_to(s.reshape(-1, 1, 1) if s.ndim <= 1 else s, (snap.N, self.d, self.d))
        s = s * np.eye(self.d) if s.shape[1] == 1 and self.d > 1 else s
        half = 0.5 * np.einsum("nij,nij->n", s, s)
        over = half > self.L * (1 + 1e-12)
        if np.any(over):
            self.audit["clamped"] += int(over.sum())
            s = s.copy()
            s[over] *= np.sqrt(self.L / half[over])[:, None, None]
        return s

    def dynamics(self):
        return DynamicsSpec(drift=self.drift, vol=self.vol, d=self.d, L=self.L,
                            name=self.name, meta={"audit": self.audit})


def _unit(rng, d):
    v = rng.standard_normal(d)
    return v / np.linalg.norm(v)


def _member(kind, rng, L, d, k0, T0, T1):
    vmax = np.sqrt(2 * L / d)
    if kind == "frozen":
        return (lambda s: np.zeros((s.N, d))), (lambda s: 0.0), "frozen"
    if kind == "drift_pm":
        b = rng.choice([-L, L]) * np.ones(d) / np.sqrt(d)
        return (lambda s: np.broadcast_to(b, (s.N, d))), (lambda s: 0.0), f"drift {b[0]:+.3g}"
    if kind == "unit_vol":
        return (lambda s: np.zeros((s.N, d))), (lambda s: 1.0), "vol 1"
    if kind == "constant":
        b = _unit(rng, d) * L * rng.uniform() ** (1 / d) * rng.choice([-1, 1])
        v = rng.uniform(0, vmax)
        return (lambda s: np.broadcast_to(b, (s.N, d))), (lambda s: v), f"constant b={b[0]:.3g} v={v:.3g}"
    if kind == "extreme":
        b = _unit(rng, d) * L * rng.choice([-1, 1])
        v = rng.choice([0.0, vmax])
        return (lambda s: np.broadcast_to(b, (s.N, d))), (lambda s: v), f"extreme b={b[0]:+.3g} v={v:.3g}"
    if kind == "piecewise":
        cuts = np.sort(rng.uniform(T0, T1, rng.integers(1, 4)))
        bs = [_unit(rng, d) * L * rng.uniform() for _ in range(len(cuts) + 1)]
        vs = [rng.uniform(0, vmax) for _ in range(len(cuts) + 1)]

        def piece(s):
            return int(np.searchsorted(cuts, s.t, side="right"))
        return ((lambda s: np.broadcast_to(bs[piece(s)], (s.N, d))),
                (lambda s: vs[piece(s)]), f"piecewise {len(cuts) + 1} pieces")
    if kind == "sign_feedback":
        sgn = rng.choice([-1.0, 1.0])
        v = rng.uniform(0, vmax)

        def drift(s):
            dev = s.paths[:, -1] - s.paths[:, k0]
            return sgn * L * np.sign(dev) / np.sqrt(d)
        return drift, (lambda s: v), f"sign_feedback {sgn:+.0f} v={v:.3g}"
    if kind == "threshold":
        r = rng.uniform(0.0, 0.5)
        b = _unit(rng, d) * L * rng.uniform()

        def vol(s):
            dev = np.linalg.norm(s.paths[:, -1] - s.paths[:, k0], axis=1)
            return np.where(dev < r, vmax, 0.0)
        return (lambda s: np.broadcast_to(b, (s.N, d))), vol, f"threshold r={r:.3g}"
    if kind == "state_split":
        sgn = rng.choice([-1.0, 1.0])

        def drift(s):
            x0 = s.paths[:, k0, 0]
            side = np.where(x0 > np.median(x0), 1.0, -1.0)
            return sgn * L * side[:, None] * np.ones((1, d)) / np.sqrt(d)
        v = rng.choice([0.0, vmax])
        return drift, (lambda s: v), f"state_split {sgn:+.0f} v={v:.3g}"
    raise DomainError(f"unknown generator kind {kind!r}")


class PLSample(list):
    """List of sampled measures with per-sample descriptions and the clamp audit."""

    def __init__(self, items, descriptions, audit):
        super().__init__(items)
        self.descriptions = descriptions
        self.audit = audit


def iter_PL(t, mu, L, K, family="default", seed=0, horizon=None, audit=None):
    """Lazily yield ``(measure, description)`` for the ``K`` draws of ``sample_PL``.

    ``audit``, when given, is a dict that accumulates the clamp counters.
    """
    if not L > 0:
        raise DomainError("L must be positive")
    kinds = FAMILIES[family] if isinstance(family, str) else tuple(family)
    grid = mu.grid
    k0 = grid.index_at(t)
    T1 = grid.T if horizon is None else min(horizon, grid.T)
    master = BrownianDriver(seed, stream=(TAG_SAMPLER,))
    for j in range(K):
        rng = master.rng(TAG_SAMPLER, j)
        kind = kinds[int(rng.integers(len(kinds)))]
        b, v, text = _member(kind, rng, L, mu.d, k0, grid.time(k0), T1)
        spec = SemimartingaleSpec(b, v, L, mu.d, name=text)
        traj = simulate_trajectory(t, mu, spec.dynamics(), seed=seed, stream=(TAG_SAMPLER, j),
                                   horizon=T1)
        if audit is not None:
            for key in ("clamped", "evaluations"):
                audit[key] = audit.get(key, 0) + spec.audit[key]
        yield traj.measure, text


def sample_PL(t, mu, L, K, family="default", seed=0, horizon=None):
    """Draw ``K`` measures from the generator family, each agreeing with ``mu`` on [0, t].

    ``horizon`` (default T) ends the semimartingale part; particles are
    frozen afterwards, which is itself an L-bounded continuation.
    """
    audit = {"clamped": 0, "evaluations": 0}
    pairs = list(iter_PL(t, mu, L, K, family, seed, horizon, audit))
    return PLSample([m for m, _ in pairs], [d for _, d in pairs], audit)


@dataclass
class MomentReport:
    deltas: np.ndarray
    moments: np.ndarray
    exponent: float
    constant: float
    target_exponent: float

    @property
    def bound_holds(self):
        ok = self.moments <= self.constant * self.deltas ** self.target_exponent * (1 + 1e-12)
        return bool(np.all(ok))


def moment_bound_check(measures, t, L, p=2, max_delta=None, min_steps=8):
    """Fit sup-moment growth ``E sup_{t<=s<=t+delta} |X_s - X_t|^p`` against delta.

    For each grid offset delta the moment is the largest empirical mean over
    the supplied measures.  The exponent is a least-squares slope in
    log-log coordinates over strictly positive moments at offsets of at
    least ``min_steps`` grid steps, since the grid maximum of a few points
    under-samples the running supremum; the constant is
    the smallest C with moment <= C delta^{p/2} on every tested delta.
    """
    if p <= 0 or p % 2:
        raise DomainError("p must be a positive even integer")
    grid = measures[0].grid
    k0 = grid.index_at(t)
    kmax = grid.M if max_delta is None else grid.index_at(min(grid.T, t + max_delta))
    offsets = np.arange(1, kmax - k0 + 1)
    deltas = offsets * grid.dt
    moments = np.zeros(len(offsets))
    for mu in measures:
        dev = np.linalg.norm(mu.values[:, k0:kmax + 1] - mu.values[:, k0:k0 + 1], axis=2)
        running = np.maximum.accumulate(dev, axis=1)[:, 1:]
        moments = np.maximum(moments, np.mean(running ** p, axis=0))
    target = p / 2
    pos = (moments > 0) & (offsets >= min(min_steps, max(len(offsets) - 1, 1)))
    if pos.sum() >= 2:
        exponent = float(np.polyfit(np.log(deltas[pos]), np.log(moments[pos]), 1)[0])
    else:
        exponent = float("nan")
    constant = float(np.max(moments / deltas ** target)) if len(deltas) else 0.0
    return MomentReport(deltas, moments, exponent, constant, target)
