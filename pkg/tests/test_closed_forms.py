import itertools

import numpy as np
import pytest
import sympy as sp

from pathmaster.closed_forms import (counterexample_instances, distortion_value, distortion_value_mc,
                                     example_quadratic, get_distortion, get_nonlinearity, heat_solution,
                                     heat_value_mc, layer_cake, lookup, quartic_branch_value,
                                     semilinear_solution)
from pathmaster.errors import ConfigurationError, DomainError
from pathmaster.master_core import classical_residual
from pathmaster.mckv_sim import constant_dynamics, simulate_mkv
from pathmaster.path_measure import PathMeasure, TimeGrid


@pytest.fixture(scope="module")
def flow():
    mu0 = PathMeasure.constant(TimeGrid(1.0, 100), np.random.default_rng(0).normal(0, 0.5, 300))
    return simulate_mkv(0.0, mu0, constant_dynamics(0.2, 0.7), seed=1)


def test_lookup_ids():
    assert lookup("quadratic").id == "quadratic"
    assert lookup("heat/terminal_sine").id == "heat/terminal_sine/zero"
    assert lookup("semilinear/half_square/neg_abs").generator is not None
    assert lookup("quartic").meta["gap_target"] == 2.0
    for bad in ("nothing", "heat/x/y/z", "semilinear/half_square"):
        with pytest.raises(ConfigurationError):
            lookup(bad)
    with pytest.raises(ConfigurationError):
        lookup("heat/terminal_square", bogus=1)


def test_heat_point_mass_value():
    mu = PathMeasure.constant(TimeGrid(2.0, 10), np.zeros(4))
    V = heat_solution("terminal_square").functional
    assert V(0.0, mu) == 2.0


@pytest.mark.parametrize("g_id", ["terminal_linear", "terminal_square", "terminal_sine",
                                  "terminal_normal_cdf"])
def test_heat_closed_form_against_monte_carlo(flow, g_id):
    V = heat_solution(g_id).functional
    mean, se = heat_value_mc(g_id, 0.4, flow, n_draws=400_000, seed=3)
    assert abs(mean - V(0.4, flow)) <= 4 * se + 1e-12


@pytest.mark.parametrize("ids", [("terminal_sine", "zero"), ("terminal_normal_cdf", "square"),
                                 ("time_average", "zero"), ("terminal_square", "square")])
def test_heat_residuals(flow, ids):
    e = heat_solution(*ids)
    for t in np.linspace(0.1, 0.9, 5):
        assert abs(classical_residual(e.functional, e.generator, t, flow)) < 1e-10


def test_running_max_is_monte_carlo_only(flow):
    e = heat_solution("running_max_tanh")
    assert e.functional is None
    mean, se = heat_value_mc("running_max_tanh", 0.5, flow, n_draws=20_000)
    assert -1 < mean < 1 and se > 0


def test_identity_distortion_is_plain_expectation(flow):
    d = distortion_value("identity").functional
    h = heat_solution("terminal_normal_cdf").functional
    assert abs(d(0.3, flow) - h(0.3, flow)) < 1e-9
    mc_d = distortion_value_mc("identity", 0.3, flow, n_draws=100_000, seed=4)
    mc_h, _ = heat_value_mc("terminal_normal_cdf", 0.3, flow, n_draws=100_000, seed=4)
    assert abs(mc_d - mc_h) < 1e-12


def test_layer_cake_identity_is_mean():
    x = np.random.default_rng(0).uniform(size=1000)
    assert np.isclose(layer_cake(x, lambda p: p), x.mean(), rtol=1e-13)
    with pytest.raises(DomainError):
        layer_cake([-1.0], lambda p: p)


def test_reverse_s_residual_and_mc(flow):
    e = distortion_value("reverse_s")
    for t in (0.2, 0.5, 0.8):
        assert abs(classical_residual(e.functional, e.generator, t, flow)) < 5e-3
    closed = e.functional(0.5, flow)
    mc = distortion_value_mc("reverse_s", 0.5, flow, n_draws=400_000, seed=1)
    assert abs(mc - closed) < 5e-3


def test_piecewise_linear_mollification(flow):
    rough = distortion_value("piecewise_linear")
    assert rough.generator is None and not rough.functional.has_derivatives
    v = rough.functional(0.5, flow)
    gaps = [abs(distortion_value("piecewise_linear", n).functional(0.5, flow) - v) for n in (4, 16, 64)]
    assert all(g <= 1 / n for g, n in zip(gaps, (4, 16, 64)))
    with pytest.raises(DomainError):
        get_distortion("piecewise_linear", 2)


def test_semilinear_pairing_and_terminal_value(flow):
    with pytest.raises(ConfigurationError):
        semilinear_solution("neg_half_square", "neg_logcosh")
    with pytest.raises(ConfigurationError):
        semilinear_solution("half_square", "logcosh")
    e = semilinear_solution("half_square", "neg_abs")
    x = flow.marginal(1.0)[:, 0]
    assert np.isclose(e.functional(1.0, flow), -np.mean(np.abs(x)))
    assert e.meta["truncation"](0.3, flow) < 1e-9


@pytest.mark.parametrize("ids", [("half_square", "neg_logcosh"), ("neg_half_square", "logcosh"),
                                 ("abs", "neg_abs"), ("neg_abs", "abs")])
def test_semilinear_residuals(flow, ids):
    e = semilinear_solution(*ids)
    for t in (0.2, 0.5, 0.8):
        assert abs(classical_residual(e.functional, e.generator, t, flow)) < 1e-6


def test_semilinear_zero_nonlinearity_is_heat(flow):
    e = semilinear_solution("zero", "neg_abs")
    x = flow.marginal(0.4)[:, 0]
    tau = 0.6
    s = np.sqrt(tau)
    from scipy.special import ndtr
    expected = -np.mean(x * (2 * ndtr(x / s) - 1) + 2 * s * np.exp(-0.5 * (x / s) ** 2) / np.sqrt(2 * np.pi))
    assert np.isclose(e.functional(0.4, flow), expected, rtol=1e-9)


def test_semilinear_mollified_converges(flow):
    base = semilinear_solution("abs", "neg_abs").functional(0.5, flow)
    gaps = [abs(semilinear_solution("abs", "neg_abs", mollify_n=n).functional(0.5, flow) - base)
            for n in (4, 16, 64)]
    assert gaps[0] > gaps[1] > gaps[2]
    assert gaps[2] < 2 / 64


def test_nonlinearity_conjugates():
    g = get_nonlinearity("half_square", 1.0)
    for a in (-2.0, -0.5, 0.0, 0.7, 3.0):
        ys = np.linspace(-1, 1, 20001)
        assert np.isclose(g.conjugate(a), np.max(a * ys - 0.5 * ys * ys), atol=1e-7)


def test_quartic_branch_oracle_is_symbolic():
    eps, B = sp.symbols("eps B", real=True)
    # moments of a standard normal
    mom = {0: 1, 1: 0, 2: 1, 3: 0, 4: 3}

    def gauss_mean(expr):
        poly = sp.Poly(sp.expand(expr), B)
        return sum(c * mom[m[0]] for m, c in zip(poly.monoms(), poly.coeffs()))
    for a_pos, a_neg in itertools.product([-1, sp.Rational(-1, 2), 0, sp.Rational(1, 2), 1], repeat=2):
        cp, cn = 1 + a_pos ** 2, 1 + a_neg ** 2
        m2 = (gauss_mean((eps + cp * B) ** 2) + gauss_mean((-eps + cn * B) ** 2)) / 2
        m4 = (gauss_mean((eps + cp * B) ** 4) + gauss_mean((-eps + cn * B) ** 4)) / 2
        sym = sp.expand(m4 / 3 - m2 ** 2)
        for e in (0.0, 0.1, 0.3):
            assert np.isclose(float(sym.subs(eps, e)), quartic_branch_value(e, float(a_pos), float(a_neg)),
                              rtol=1e-12, atol=1e-12)
    best = sp.expand((gauss_mean((eps + 2 * B) ** 4) + gauss_mean((-eps + B) ** 4)) / 6
                     - ((gauss_mean((eps + 2 * B) ** 2) + gauss_mean((-eps + B) ** 2)) / 2) ** 2)
    assert sp.simplify(best - (sp.Rational(9, 4) - sp.Rational(2, 3) * eps ** 4)) == 0


def test_registry_branch_polynomials():
    meta = {e.id: e for e in counterexample_instances()}["quartic"].meta
    for e in (0.0, 0.1, 0.2):
        assert np.isclose(meta["branch_polynomial"](e), quartic_branch_value(e, 1.0, 0.0))
        assert np.isclose(meta["stated_branch_polynomial"](e) - meta["branch_polynomial"](e), -2 * e * e)
    assert quartic_branch_value(0.0, 1.0, 1.0) == 0.0


def test_quadratic_entry_metadata():
    e = example_quadratic()
    assert e.functional.has_derivatives and e.generator is None
