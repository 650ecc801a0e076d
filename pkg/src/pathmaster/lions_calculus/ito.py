"""Functional Ito formula check along a simulated particle flow."""

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DomainError
from .derivatives import numeric_dmu, numeric_dwdmu, time_derivative


@dataclass
class ItoReport:
    residual: float
    relative: float
    stderr: float
    change: float
    steps: int
    N: int
    qv: str
    batch_residuals: np.ndarray

    def as_record(self):
        return {"residual": self.residual, "relative": self.relative, "stderr": self.stderr,
                "change": self.change, "steps": self.steps, "N": self.N, "qv": self.qv}


def _derivatives(f, t, mu, numeric):
    if f.has_derivatives:
        return f.dt(t, mu), np.asarray(f.dmu(t, mu)), np.asarray(f.dwdmu(t, mu))
    if not numeric:
        raise ConfigurationError(f"{f.name} has no closed-form derivatives; pass numeric=True")
    ft = f.dt(t, mu) if f.dt is not None else time_derivative(f, t, mu)
    dm = np.asarray(f.dmu(t, mu)) if f.dmu is not None else numeric_dmu(f, t, mu)
    dw = np.asarray(f.dwdmu(t, mu)) if f.dwdmu is not None else numeric_dwdmu(f, t, mu)
    return ft, dm, dw


def _residual(f, traj, idx, k_end, qv, numeric):
    mu = traj.measure if idx is None else traj.measure.subset(idx)
    grid = mu.grid
    k0 = traj.start
    dt = grid.dt
    sel = slice(None) if idx is None else idx
    incr = traj.increments[sel]
    diff = traj.diffusion[sel]
    total = 0.0
    for k in range(k0, k_end):
        t = grid.time(k)
        ft, dm, dw = _derivatives(f, t, mu, numeric)
        dx = incr[:, k - k0]
        if qv == "sigma":
            q = diff[:, k - k0] * dt
        else:
            q = dx[:, :, None] * dx[:, None, :]
        sym = 0.5 * (dw + np.swapaxes(dw, 1, 2))
        first = np.einsum("nd,nd->n", dm, dx)
        second = 0.5 * np.einsum("nij,nij->n", sym, q)
        total += ft * dt + float(np.mean(first + second))
    change = f(grid.time(k_end), mu) - f(grid.time(k0), mu)
    return change - total, change


def ito_residual(f, traj, t_end=None, qv="sigma", numeric=False, batches=16):
    """Compare the change of ``f`` along a simulated flow with its Ito expansion.

    ``residual = [f(t_end) - f(t_start)] - sum_k [d_t f dt + mean_i(d_mu f . dX
    + 1/2 sym(d_w d_mu f) : Q)]`` with ``Q = sigma sigma^T dt`` (``qv="sigma"``)
    or ``dX dX^T`` (``qv="increments"``).  The standard error comes from
    ``batches`` disjoint particle groups, each treated as its own empirical
    flow: group residuals have variance roughly ``batches`` times that of the
    full residual.
    """
    if qv not in ("sigma", "increments"):
        raise DomainError("qv must be 'sigma' or 'increments'")
    grid = traj.grid
    k_end = grid.M if t_end is None else grid.index_at(t_end)
    if k_end <= traj.start:
        raise DomainError("t_end must lie after the trajectory start")
    res, change = _residual(f, traj, None, k_end, qv, numeric)
    N = traj.measure.N
    groups = []
    if batches and batches > 1 and N >= 2 * batches:
        for idx in np.array_split(np.arange(N), batches):
            groups.append(_residual(f, traj, idx, k_end, qv, numeric)[0])
    groups = np.array(groups)
    stderr = float(np.std(groups, ddof=1) / np.sqrt(len(groups))) if len(groups) > 1 else float("nan")
    rel = abs(res) / abs(change) if change != 0 else (0.0 if res == 0 else float("inf"))
    return ItoReport(float(res), float(rel), stderr, float(change), k_end - traj.start, N, qv, groups)
