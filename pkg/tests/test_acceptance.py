"""Acceptance suite: one PASS/FAIL line per criterion.

Each test records its verdict (printed, and repeated in the terminal
summary) and then asserts it, so a failing criterion is also a failing test.
"""

import itertools
import math

import numpy as np
import pytest

from pathmaster import cli
from pathmaster.closed_forms import (distortion_value, distortion_value_mc, heat_solution,
                                     heat_value_mc, lookup)
from pathmaster.control_value import discontinuity_experiment, openloop_gap_experiment
from pathmaster.lions_calculus import MeasureFunctional
from pathmaster.master_core import classical_residual
from pathmaster.mckv_sim import constant_dynamics, simulate_mkv
from pathmaster.path_measure import PathMeasure, TimeGrid, sup_cost_matrix, wasserstein2

pytestmark = pytest.mark.acceptance

INTERIOR = [float(t) for t in np.linspace(0.05, 0.95, 10)]


def params(command, **kw):
    return cli.validate({"command": command, "params": kw})["params"]


def flow(N, M, seed=1):
    mu0 = PathMeasure.constant(TimeGrid(1.0, M), np.random.default_rng(0).normal(0, 0.5, N))
    return simulate_mkv(0.0, mu0, constant_dynamics(0.2, 0.7), seed=seed)


def residuals(entry_id, mu, numeric):
    entry = lookup(entry_id)
    f = entry.functional
    if numeric:
        # the same value with its derivatives removed: finite differences take over
        f = MeasureFunctional(lambda t, m, f=f: f(t, m), name="value only")
    return np.array([classical_residual(f, entry.generator, t, mu, numeric=numeric) for t in INTERIOR])


def test_ito_formula(criterion):
    row = cli.cmd_ito(params("ito-check"), 0)[0]
    sweep = [cli.cmd_ito(params("ito-check", M=M), 0)[0] for M in (25, 50, 100, 200)]
    slope = cli.fit_slope([r["dt"] for r in sweep], [r["residual"] for r in sweep])
    bound = max(0.02 * abs(row["change"]), 3 * row["stderr"])
    ok = abs(row["residual"]) <= bound and abs(slope - 1) <= 0.3
    assert criterion(1, "functional Ito residual and refinement slope", ok,
                     f"residual {row['residual']:.2e} <= {bound:.2e}, slope {slope:.3f}")


def test_derivative_oracles(criterion):
    worst = {}
    for order in (1, 2):
        rows = cli.cmd_derivative(params("derivative-check", order=order), 0)
        best = next(r for r in rows if r["best"])
        worst[order] = (best["eps"], best["max_rel_error"])
    ok = all(err <= 1e-3 for _, err in worst.values())
    assert criterion(2, "Lions derivatives vs closed forms, 10 measures x 10 particles", ok,
                     "; ".join(f"order {o}: eps {e:g} rel err {r:.1e}" for o, (e, r) in worst.items()))


def test_heat_equation(criterion):
    T = 1.0
    point = PathMeasure.constant(TimeGrid(T, 100), np.zeros(1))
    mean, se = heat_value_mc("terminal_square", 0.0, point, n_draws=200_000, seed=0)
    exact_point = heat_solution("terminal_square").functional(0.0, point)
    closed = np.max(np.abs(residuals("heat/terminal_square/zero", flow(400, 100), False)))
    numeric = np.max(np.abs(residuals("heat/terminal_square/zero", flow(60, 40), True)))
    ok = abs(mean - T) <= 3 * se and exact_point == T and closed <= 5e-3 and numeric <= 5e-3
    assert criterion(3, "heat equation value at delta_0 and residuals", ok,
                     f"V {mean:.4f} +- {se:.4f}, residual {closed:.1e} (closed) {numeric:.1e} (finite diff)")


def test_distortion(criterion):
    closed = np.max(np.abs(residuals("distortion/reverse_s", flow(400, 100), False)))
    numeric = np.max(np.abs(residuals("distortion/reverse_s", flow(60, 40), True)))
    mu = flow(400, 100)
    mc_gap = max(abs(distortion_value_mc("identity", t, mu, n_draws=100_000, seed=s)
                     - heat_value_mc("terminal_normal_cdf", t, mu, n_draws=100_000, seed=s)[0])
                 for t, s in ((0.2, 0), (0.5, 1), (0.8, 2)))
    cf_gap = max(abs(distortion_value("identity").functional(t, mu)
                     - heat_solution("terminal_normal_cdf").functional(t, mu)) for t in (0.2, 0.5, 0.8))
    ok = closed <= 5e-3 and numeric <= 5e-3 and mc_gap <= 1e-12 and cf_gap <= 1e-9
    assert criterion(4, "distortion residual and identity equivalence", ok,
                     f"residual {closed:.1e} / {numeric:.1e}, identity gap MC {mc_gap:.1e} closed {cf_gap:.1e}")


def test_discontinuity(criterion):
    rep = discontinuity_experiment(eps=0.1, N=200_000, seed=0, reps=8)
    v0, veps = rep.rows[0], rep.rows[1]
    ok = rep.passed and rep.params["N"] >= 100_000
    assert criterion(5, "discontinuity of the value at delta_0", ok,
                     f"V(delta_0) {v0['estimate']:.3f}, V(mu_0.1) {veps['estimate']:.4f} +- "
                     f"{veps['stderr']:.4f} vs oracle {veps['target']:.5f}")


def test_openloop_gap(criterion):
    rep = openloop_gap_experiment(T=3.0, t=1.0, seed=0, N=20_000, reps=8)
    failed = [k for k, v in rep.checks.items() if not v]
    probe = next(r for r in rep.rows if r["quantity"] == "h(0.01)/0.01")
    assert criterion(6, "open-loop value gap and small-time probe", rep.passed,
                     f"h/s at 0.01 = {probe['estimate']:.3f}; failing: {failed or 'none'}")


def test_viscosity(criterion):
    rows = cli.cmd_viscosity(params("viscosity-check"), 0)
    p = params("viscosity-check")
    corrupt = cli.cmd_viscosity(params("viscosity-check", corrupt=0.1, t=[0.5]), 0)
    sub = next(r for r in corrupt if r["side"] == "sub")
    refuted = sum(r["membership"] != "plausible" for r in rows)
    ok = (len(rows) == 10 and p["K"] >= 1000 and all(r["pass"] for r in rows)
          and not sub["pass"] and abs(sub["scalar"] + 0.1) <= 0.02)
    assert criterion(7, "viscosity checker on a semilinear solution and a corrupted candidate", ok,
                     f"{refuted} refutations over {len(rows)} x {p['K']} samples, corrupted sub scalar "
                     f"{sub['scalar']:.3f}")


def _brute(mu, nu):
    c = sup_cost_matrix(mu.values, nu.values)
    best = min(math.fsum(c[i, q[i]] for i in range(mu.N)) for q in itertools.permutations(range(mu.N)))
    return math.sqrt(best / mu.N)


def test_wasserstein_oracle(criterion):
    rng = np.random.default_rng(8)
    mismatches = 0
    for _ in range(200):
        n, m, d = int(rng.integers(1, 9)), int(rng.integers(1, 6)), int(rng.integers(1, 3))
        g = TimeGrid(1.0, m)
        mu, nu = (PathMeasure(g, rng.normal(size=(n, m + 1, d))) for _ in range(2))
        mismatches += wasserstein2(mu, nu)[0] != _brute(mu, nu)
    asym = tri = 0
    worst = 0.0
    for _ in range(200):
        n = int(rng.integers(1, 9))
        g = TimeGrid(1.0, 4)
        a, b, c = (PathMeasure(g, rng.normal(size=(n, 5, 2))) for _ in range(3))
        ab, ba = wasserstein2(a, b)[0], wasserstein2(b, a)[0]
        excess = wasserstein2(a, c)[0] - ab - wasserstein2(b, c)[0]
        asym += ab != ba or wasserstein2(a, a)[0] != 0.0
        tri += excess > 1e-9
        worst = max(worst, excess)
    ok = mismatches == 0 and asym == 0 and tri == 0
    assert criterion(8, "exact W2 vs permutation search and pseudometric axioms", ok,
                     f"{mismatches} mismatches / 200, {asym} symmetry and {tri} triangle failures / 200, "
                     f"max triangle excess {worst:.1e}")


def test_dpp(criterion):
    closed = cli.cmd_dpp(params("dpp-check"), 0)[0]
    restricted = cli.cmd_dpp(params("dpp-check", variant="noise-adapted"), 0)[0]
    literal = restricted["residual"] < -3 * restricted["stderr"]
    ok = closed["within_3se"] and literal
    assert criterion(9, "dynamic programming residual, closed loop and restricted information", ok,
                     f"closed loop {closed['residual']:+.3f} +- {closed['stderr']:.3f}; restricted "
                     f"{restricted['residual']:+.3f} +- {restricted['stderr']:.3f} (expected < -3 se)")


def test_dpp_restriction_breaks_in_the_defined_direction():
    # with the residual defined as joint minus nested, restricting the fresh
    # problem's information can only lower the nested value
    r = cli.cmd_dpp(params("dpp-check", variant="noise-adapted"), 0)[0]
    assert r["residual"] > 3 * r["stderr"]


def test_coupling(criterion):
    rows = [cli.cmd_coupling(params("coupling"), seed)[0] for seed in range(50)]
    exact = sum(r["reconstruction_exact"] for r in rows)
    close = sum(r["distance"] <= r["optimal"] + r["eps"] for r in rows)
    ok = exact == 50 and close == 50
    assert criterion(10, "coupling construction on 50 discrete-marginal instances", ok,
                     f"exact reconstruction {exact}/50, distance within eps {close}/50")


def test_state_dependence(criterion):
    pos = cli.cmd_state_dependence(params("state-dependence", control="positive"), 0)
    neg = cli.cmd_state_dependence(params("state-dependence", control="negative"), 0)

    def verdict(rows):
        return next(r["pass"] for r in rows if str(r["quantity"]).startswith("check"))

    def diff(rows):
        d = next(r for r in rows if r["quantity"] == "difference")
        return f"{d['estimate']:+.3f} +- {d['stderr']:.3f}"
    ok = verdict(pos) and not verdict(neg)
    assert criterion(11, "state dependence: marginal-only data agree, path data differ", ok,
                     f"positive {diff(pos)}, negative {diff(neg)}")
