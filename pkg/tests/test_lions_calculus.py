import numpy as np
import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from pathmaster.closed_forms import example_quadratic
from pathmaster.errors import ConfigurationError, DomainError, EvaluationError
from pathmaster.lions_calculus import (MeasureFunctional, bumped, eps_sweep, ito_residual,
                                       lions_derivative, moment_functional, numeric_dmu,
                                       numeric_dwdmu, running_integral, second_pathwise_derivative,
                                       time_derivative)
from pathmaster.mckv_sim import DynamicsSpec, constant_dynamics, simulate_mkv, simulate_trajectory
from pathmaster.path_measure import PathMeasure, TimeGrid

QUAD = example_quadratic().functional


def test_running_integral_is_linear_past_the_stop(brownian):
    mu = brownian(N=4, M=10)
    s = mu.stop(0.3)
    a = running_integral(s.values, s.grid, 0.3)
    b = running_integral(s.values, s.grid, 0.8)
    assert np.allclose(b - a, 0.5 * s.values[:, 3])


def test_running_integral_between_grid_points():
    g = TimeGrid(1.0, 4)
    v = np.array([[0.0, 1.0, 2.0, 3.0, 4.0]])[:, :, None]
    assert np.allclose(running_integral(v, g, 0.6), 0.25 * 1.0 + 0.1 * 2.0)


def test_functional_rejects_non_finite(brownian):
    f = MeasureFunctional(lambda t, mu: float("nan"), name="bad")
    with pytest.raises(EvaluationError):
        f(0.0, brownian())


def _symbolic_quadratic(n):
    """f as a sympy expression of the time-t values x_i with running integrals I_i as symbols."""
    x = sp.symbols(f"x0:{n}")
    I = sp.symbols(f"I0:{n}")
    mean = lambda terms: sum(terms) / n  # noqa: E731
    f = mean([xi * Ii for xi, Ii in zip(x, I)]) - mean([xi ** 2 for xi in x]) * mean(I)
    return f, x, I


def test_quadratic_derivatives_match_symbolic_oracle(brownian):
    n = 4
    f, x, I = _symbolic_quadratic(n)
    mu = brownian(N=n, M=8, seed=5)
    t = 0.5
    k = mu.grid.index_at(t)
    xv = mu.values[:, k, 0]
    Iv = running_integral(mu.values, mu.grid, t)[:, 0]
    subs = {**dict(zip(x, xv)), **dict(zip(I, Iv))}
    dmu = QUAD.dmu(t, mu)[:, 0]
    dwdmu = QUAD.dwdmu(t, mu)[:, 0, 0]
    for i in range(n):
        assert np.isclose(float(n * sp.diff(f, x[i]).subs(subs)), dmu[i], rtol=1e-12)
        assert np.isclose(float(n * sp.diff(f, x[i], 2).subs(subs)), dwdmu[i], rtol=1e-12)
    # d_t: x frozen, each I_i grows at rate x_i
    dt_sym = sum(sp.diff(f, I[i]) * x[i] for i in range(n))
    assert np.isclose(float(dt_sym.subs(subs)), QUAD.dt(t, mu), rtol=1e-12)


def test_numeric_derivatives_of_quadratic(brownian):
    mu = brownian(N=30, M=20, seed=2)
    t = 0.55
    assert np.allclose(numeric_dmu(QUAD, t, mu), QUAD.dmu(t, mu), rtol=1e-6, atol=1e-8)
    assert np.allclose(numeric_dwdmu(QUAD, t, mu, eps=1e-2), QUAD.dwdmu(t, mu), rtol=1e-5)
    assert np.isclose(time_derivative(QUAD, t, mu), QUAD.dt(t, mu), rtol=1e-6)


def test_bump_leaves_past_untouched(brownian):
    mu = brownian(N=3, M=10)
    b = bumped(mu, 1, [0.5], 0.4)
    assert np.array_equal(b.values[:, :4], mu.values[:, :4])
    assert np.allclose(b.values[1, 4:] - mu.values[1, 4:], 0.5)


def test_eps_sweep_is_v_shaped(brownian):
    mu = brownian(N=20, M=10, seed=1)
    f = MeasureFunctional(lambda t, m: float(np.mean(np.sin(m.marginal(t)[:, 0]))))
    t, i = 0.5, 3
    exact = np.cos(mu.marginal(t)[i])
    eps = np.logspace(-1, -10, 10)
    errs, best = eps_sweep(f, t, mu, i, exact, eps, order=1)
    j = int(np.argmin(errs))
    assert 0 < j < len(eps) - 1
    assert errs[0] > errs[j] and errs[-1] > errs[j]
    assert best == eps[j]


def test_second_derivative_tuned_eps(brownian):
    mu = brownian(N=20, M=10, seed=1)
    f = moment_functional(power=4)
    t, i = 0.5, 2
    exact = f.dwdmu(t, mu)[i]
    errs, best = eps_sweep(f, t, mu, i, exact, np.logspace(-1, -6, 11), order=2)
    assert errs.min() / abs(exact).max() < 1e-3
    est = second_pathwise_derivative(f, t, mu, i, best, best)
    assert np.allclose(est, exact, rtol=1e-3)


def test_derivative_argument_checks(brownian):
    mu = brownian(N=3)
    with pytest.raises(DomainError):
        lions_derivative(QUAD, 0.5, mu, 7)
    with pytest.raises(DomainError):
        lions_derivative(QUAD, 0.5, mu, 0, eps=-1.0)
    with pytest.raises(DomainError):
        time_derivative(QUAD, 1.0, mu)


@given(st.integers(0, 1000), st.floats(-2, 2))
def test_moment_functional_lions_derivative(seed, shift):
    rng = np.random.default_rng(seed)
    mu = PathMeasure.constant(TimeGrid(1.0, 4), rng.normal(size=10) + shift)
    f = moment_functional(power=3)
    est = lions_derivative(f, 0.5, mu, 0, eps=1e-4)
    assert np.allclose(est, f.dmu(0.5, mu)[0], rtol=1e-6, atol=1e-7)


def _flow(N, M, seed=0, x0=0.0):
    dyn = DynamicsSpec(drift=lambda s, a: np.sin(s.state), vol=lambda s, a: 1.0)
    mu = PathMeasure.constant(TimeGrid(1.0, M), np.full(N, x0))
    return simulate_trajectory(0.0, mu, dyn, seed=seed)


def test_ito_residual_small_and_first_order():
    res = [ito_residual(QUAD, _flow(4000, M)).residual for M in (25, 50, 100)]
    slope = np.polyfit(np.log([1 / 25, 1 / 50, 1 / 100]), np.log(np.abs(res)), 1)[0]
    assert 0.6 < slope < 1.4


def test_ito_increment_quadratic_variation():
    traj = _flow(4000, 100)
    a = ito_residual(QUAD, traj, qv="sigma")
    b = ito_residual(QUAD, traj, qv="increments")
    assert abs(a.residual - b.residual) < 10 * max(a.stderr, b.stderr)
    assert a.as_record()["steps"] == 100


def test_ito_on_martingale_of_brownian():
    # E[X_t^2] along Brownian motion: change = t, second-order term supplies it
    mu = PathMeasure.constant(TimeGrid(1.0, 50), np.zeros(5000))
    traj = simulate_trajectory(0.0, mu, constant_dynamics(0.0, 1.0), seed=1)
    rep = ito_residual(moment_functional(2), traj)
    assert abs(rep.residual) < 3 * rep.stderr + 1e-12


def test_ito_needs_derivatives_or_numeric(brownian):
    f = MeasureFunctional(lambda t, m: float(np.mean(m.marginal(t) ** 2)))
    traj = _flow(40, 5)
    with pytest.raises(ConfigurationError):
        ito_residual(f, traj)
    rep = ito_residual(f, traj, numeric=True, batches=0)
    assert np.isfinite(rep.residual)
    with pytest.raises(DomainError):
        ito_residual(QUAD, traj, qv="other")
