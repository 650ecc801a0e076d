"""Master-equation generators G(t, mu, y, Z, Gamma) and their structural audits."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, ShapeError


def _as_batch(Z, Gamma, d):
    Z = np.asarray(Z, dtype=float)
    Gamma = np.asarray(Gamma, dtype=float)
    if Z.ndim == 1:
        Z = Z[:, None]
    if Gamma.ndim == 1:
        Gamma = Gamma[:, None, None]
    if Z.shape[1] != d or Gamma.shape[1:] != (d, d) or Z.shape[0] != Gamma.shape[0]:
        raise ShapeError(f"Z {Z.shape} and Gamma {Gamma.shape} do not match d={d}")
    return Z, Gamma


@dataclass(frozen=True)
class GeneratorSpec:
    """A generator with declared Lipschitz constant ``L0``.

    ``func(t, mu, y, Z, Gamma)`` receives per-particle arrays Z (N, d) and
    Gamma (N, d, d).  For expectation-form generators ``g1`` and ``g2`` are
    also stored: ``G = g1(t, mu, y, mean(g2(t, mu, y, Z, Gamma)))``.
    """

    func: object
    L0: float = 1.0
    name: str = "generator"
    g1: object = None
    g2: object = None
    meta: dict = field(default_factory=dict, compare=False)

    def __call__(self, t, mu, y, Z, Gamma):
        Z, Gamma = _as_batch(Z, Gamma, mu.d)
        return float(self.func(t, mu, y, Z, Gamma))

    @property
    def expectation_form(self):
        return self.g1 is not None and self.g2 is not None


def expectation_form(g1, g2, L0=1.0, name="generator", **meta):
    def func(t, mu, y, Z, Gamma):
        return g1(t, mu, y, float(np.mean(g2(t, mu, y, Z, Gamma))))
    return GeneratorSpec(func, L0, name, g1, g2, meta)


def zero_generator():
    return expectation_form(lambda t, mu, y, m: 0.0, lambda t, mu, y, Z, G: np.zeros(len(Z)),
                            L0=0.0, name="zero")


def _trace(Gamma):
    return np.trace(Gamma, axis1=1, axis2=2)


def heat_generator(f=None, d=1):
    """``E[tr(Gamma)/2 + f(t, X)]``; ``f(t, x)`` takes particle states (N, d)."""
    def g2(t, mu, y, Z, Gamma):
        out = 0.5 * _trace(Gamma)
        if f is not None:
            out = out + np.asarray(f(t, mu.marginal(t)), dtype=float)
        return out
    return expectation_form(lambda t, mu, y, m: m, g2, L0=0.5 * np.sqrt(d), name="heat")


def semilinear_generator(G1, L0=1.0, lip=1.0):
    """``E[Gamma]/2 + G1(E[Z])`` for d = 1; ``lip`` is the Lipschitz constant of G1."""
    def func(t, mu, y, Z, Gamma):
        m = float(np.mean(Z[:, 0]))
        if abs(m) > L0 * (1 + 1e-9):
            raise ConfigurationError(f"E[Z]={m} leaves the domain [-{L0}, {L0}] of G1")
        return 0.5 * float(np.mean(Gamma[:, 0, 0])) + float(G1(m))
    return GeneratorSpec(func, max(0.5, lip), "semilinear", meta={"G1": G1, "domain": L0})


def hjb_generator(dyn, actions, f=None):
    """Pointwise Hamiltonian ``E[max_a (sigma sigma^T(a) : Gamma / 2 + b(a) . Z + f(a))]``.

    ``actions`` is a finite list of scalars; coefficients are read from
    ``dyn`` at the snapshot of ``mu`` at ``t``.
    """
    from ..mckv_sim import Snapshot

    acts = np.asarray(actions, dtype=float).ravel()
    if acts.size == 0:
        raise ConfigurationError("empty action list")

    def func(t, mu, y, Z, Gamma):
        k = mu.grid.index_at(t)
        snap = Snapshot(t, k, mu.grid.dt, mu.values[:, :k + 1])
        best = np.full(mu.N, -np.inf)
        for a in acts:
            av = np.full(mu.N, a)
            b, s = dyn.coefficients(snap, av)
            h = 0.5 * np.einsum("nij,nkj,nik->n", s, s, Gamma) + np.einsum("nd,nd->n", b, Z)
            if f is not None:
                h = h + np.asarray(f(snap, av), dtype=float)
            best = np.maximum(best, h)
        return float(np.mean(best))
    return GeneratorSpec(func, dyn.L, "hjb")


def lipschitz_audit(G, t, mu, trials=20, seed=0, y=0.0, scale=1.0):
    """Largest observed ratio ``|G1 - G2| / (E|dZ| + E|dGamma|_F)`` over random batch pairs.

    A ratio above ``G.L0`` is a violation of the declared constant.
    """
    rng = np.random.default_rng(seed)
    n, d = mu.N, mu.d
    worst = 0.0
    for _ in range(trials):
        Z1, Z2 = rng.uniform(-scale, scale, (2, n, d)) / max(1.0, np.sqrt(d))
        A1, A2 = rng.normal(0, scale, (2, n, d, d))
        G1m, G2m = 0.5 * (A1 + np.swapaxes(A1, 1, 2)), 0.5 * (A2 + np.swapaxes(A2, 1, 2))
        num = abs(G(t, mu, y, Z1, G1m) - G(t, mu, y, Z2, G2m))
        den = np.mean(np.linalg.norm(Z1 - Z2, axis=1)) + np.mean(np.linalg.norm(G1m - G2m, axis=(1, 2)))
        worst = max(worst, num / den)
    return worst


def monotonicity_audit(G, t, mu, trials=20, seed=0, y=0.0, scale=1.0):
    """Smallest observed ``G(Gamma + P) - G(Gamma)`` for random PSD batches P; should be >= 0."""
    rng = np.random.default_rng(seed)
    n, d = mu.N, mu.d
    worst = np.inf
    for _ in range(trials):
        Z = rng.uniform(-scale, scale, (n, d)) / max(1.0, np.sqrt(d))
        A = rng.normal(0, scale, (n, d, d))
        Gm = 0.5 * (A + np.swapaxes(A, 1, 2))
        B = rng.normal(0, scale, (n, d, d))
        P = np.einsum("nij,nkj->nik", B, B)
        worst = min(worst, G(t, mu, y, Z, Gm + P) - G(t, mu, y, Z, Gm))
    return worst
