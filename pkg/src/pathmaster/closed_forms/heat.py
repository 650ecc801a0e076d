"""Expectations of path functionals under Brownian continuation (d = 1).

For a measure ``mu`` on paths, particles are continued after ``t`` by
independent Brownian motions.  With ``tau = T - t`` and ``x = X_t``:

=====================  ===============================  =========================
terminal id            g(omega)                         E[g | X_t = x]
=====================  ===============================  =========================
terminal_linear        omega_T                          x
terminal_square        omega_T^2                        x^2 + tau
terminal_sine          sin(omega_T)                     sin(x) exp(-tau/2)
terminal_normal_cdf    Phi(omega_T)                     Phi(x / sqrt(1 + tau))
time_average           int_0^T omega_s ds               I_t + tau x
running_max_tanh       tanh(max_s omega_s)              Monte Carlo only
=====================  ===============================  =========================

Running costs: ``zero``, or ``square`` with f(s, omega) = omega_s^2, which
adds ``tau x^2 + tau^2 / 2``.
"""

import math

import numpy as np
from scipy.special import ndtr

from ..errors import ConfigurationError, DomainError
from ..lions_calculus import MeasureFunctional, running_integral
from ..master_core.generators import heat_generator
from ..rng import BrownianDriver
from .entry import ReferenceEntry

MC_STREAM = 7


def _npdf(x):
    return np.exp(-0.5 * x * x) / math.sqrt(2 * math.pi)


# each kernel maps (x, tau, integral) -> (u, du, d2u, dtau) with dtau = du/dtau
def _linear(x, tau, I):
    z = np.zeros_like(x)
    return x, np.ones_like(x), z, z


def _square(x, tau, I):
    return x * x + tau, 2 * x, np.full_like(x, 2.0), np.ones_like(x)


def _sine(x, tau, I):
    e = math.exp(-0.5 * tau)
    return np.sin(x) * e, np.cos(x) * e, -np.sin(x) * e, -0.5 * np.sin(x) * e


def _normal_cdf(x, tau, I):
    s = math.sqrt(1 + tau)
    p = _npdf(x / s)
    return ndtr(x / s), p / s, -x * p / s ** 3, -0.5 * x * p / s ** 3


def _time_average(x, tau, I):
    z = np.zeros_like(x)
    return I + tau * x, np.full_like(x, tau), z, x


TERMINAL = {
    "terminal_linear": _linear,
    "terminal_square": _square,
    "terminal_sine": _sine,
    "terminal_normal_cdf": _normal_cdf,
    "time_average": _time_average,
}

PATH_G = {
    "terminal_linear": lambda p: p[:, -1],
    "terminal_square": lambda p: p[:, -1] ** 2,
    "terminal_sine": lambda p: np.sin(p[:, -1]),
    "terminal_normal_cdf": lambda p: ndtr(p[:, -1]),
    "running_max_tanh": lambda p: np.tanh(np.max(p, axis=1)),
}

RUNNING = ("zero", "square")


def _check_ids(g_id, f_id):
    if g_id not in TERMINAL and g_id not in PATH_G:
        raise ConfigurationError(f"unknown terminal id {g_id!r}")
    if f_id not in RUNNING:
        raise ConfigurationError(f"unknown running-cost id {f_id!r}")


def _state(t, mu, paths=None):
    v = mu.values if paths is None else paths
    x = v[:, mu.grid.index_at(t), 0]
    I = running_integral(v, mu.grid, t)[:, 0]
    return x, I


def _pieces(g_id, f_id, t, mu, paths=None):
    tau = mu.grid.T - t
    if tau < -1e-12:
        raise DomainError("t exceeds the horizon")
    tau = max(tau, 0.0)
    x, I = _state(t, mu, paths)
    u, du, d2u, dtau = TERMINAL[g_id](x, tau, I)
    if f_id == "square":
        u = u + tau * x * x + 0.5 * tau * tau
        du = du + 2 * tau * x
        d2u = d2u + 2 * tau
        dtau = dtau + x * x + tau
    return u, du, d2u, dtau


def heat_solution(g_id="terminal_square", f_id="zero"):
    """Reference entry for ``V(t, mu) = E[g(X) + int_t^T f(s, X) ds]`` under Brownian continuation.

    ``V`` solves ``d_t V + E[d_w d_mu V / 2 + f(t, X)] = 0`` with
    ``V(T, mu) = E[g(X)]``.  Entries without an analytic kernel carry no
    derivatives; use ``heat_value_mc`` for their values.
    """
    _check_ids(g_id, f_id)
    running = (lambda t, x: x[:, 0] ** 2) if f_id == "square" else None
    gen = heat_generator(running)
    if g_id not in TERMINAL:
        return ReferenceEntry(f"heat/{g_id}/{f_id}", None, gen,
                              note="no analytic kernel; Monte Carlo only",
                              meta={"g_id": g_id, "f_id": f_id, "mc_only": True})

    def value(t, mu):
        return float(np.mean(_pieces(g_id, f_id, t, mu)[0]))

    def dt(t, mu):
        # the stopped extension moves only through tau and, for time_average, I
        u, du, d2u, dtau = _pieces(g_id, f_id, t, mu)
        x, _ = _state(t, mu)
        extra = x if g_id == "time_average" else 0.0
        return float(np.mean(extra - dtau))

    def dmu(t, mu, paths=None):
        return _pieces(g_id, f_id, t, mu, paths)[1][:, None]

    def dwdmu(t, mu, paths=None):
        return _pieces(g_id, f_id, t, mu, paths)[2][:, None, None]

    fn = MeasureFunctional(value, dt, dmu, dwdmu, name=f"heat/{g_id}/{f_id}",
                           flags={"bounded_dt": g_id != "terminal_square"})
    return ReferenceEntry(f"heat/{g_id}/{f_id}", fn, gen, fn,
                          note="linear master equation with Brownian continuation",
                          meta={"g_id": g_id, "f_id": f_id})


def terminal_draws(t, mu, n_draws=1_000_000, seed=0, path=False):
    """Shared Monte Carlo stream: antithetic continuations of ``mu`` from ``t``.

    Particles are used in rotation.  Returns continued paths on the grid
    from ``t`` (shape (n_draws, steps+1)) when ``path`` is true, else the
    terminal values (n_draws,).  Draw ``j`` and ``j + n_draws/2`` are an
    antithetic pair.
    """
    if mu.d != 1:
        raise DomainError("heat reference values are for d = 1")
    if n_draws < 2 or n_draws % 2:
        raise DomainError("n_draws must be a positive even number")
    grid = mu.grid
    k = grid.index_at(t)
    half = n_draws // 2
    idx = np.arange(half) % mu.N
    x = mu.values[idx, k, 0]
    driver = BrownianDriver(seed, (MC_STREAM,))
    if not path:
        z = driver.normals(0, half, 1)[:, 0] * math.sqrt(max(grid.T - t, 0.0))
        return np.concatenate([x + z, x - z])
    steps = grid.M - k
    inc = np.stack([driver.normals(j, half, 1)[:, 0] for j in range(steps)], axis=1) * math.sqrt(grid.dt)
    walk = np.concatenate([np.zeros((half, 1)), np.cumsum(inc, axis=1)], axis=1)
    hist_max = np.max(mu.values[idx, :k + 1, 0], axis=1)
    paths = np.concatenate([x[:, None] + walk, x[:, None] - walk])
    return paths, np.concatenate([hist_max, hist_max])


def heat_value_mc(g_id, t, mu, n_draws=1_000_000, seed=0):
    """Antithetic Monte Carlo estimate of ``E[g(X)]`` (no running cost); returns (mean, stderr).

    Terminal functionals draw one Gaussian per sample.  ``running_max_tanh``
    walks the remaining grid and folds in the running maximum of the
    history up to ``t``.
    """
    if g_id not in PATH_G:
        raise ConfigurationError(f"no Monte Carlo rule for {g_id!r}")
    half = n_draws // 2
    if g_id == "running_max_tanh":
        paths, hist = terminal_draws(t, mu, n_draws, seed, path=True)
        vals = np.tanh(np.maximum(np.max(paths, axis=1), hist))
    else:
        vals = PATH_G[g_id](terminal_draws(t, mu, n_draws, seed)[:, None])
    pairs = 0.5 * (vals[:half] + vals[half:])
    return float(np.mean(vals)), float(np.std(pairs, ddof=1) / math.sqrt(half))
