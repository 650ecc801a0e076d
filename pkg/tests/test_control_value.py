import numpy as np
import pytest

from pathmaster.closed_forms import neg_variance_cost, running_max_cost, variance_dynamics
from pathmaster.control_value import (MIN_REPS, ConstantFeedback, EnumeratedSpace, FunctionFeedback,
                                      PiecewisePolicy, TableFeedback, TableSpace, dpp_residual,
                                      evaluate_policy, integral_feedback, interpolate_observed,
                                      optimize_value, policy_class_convergence, route_measures,
                                      state_dependence_check, two_point_start)
from pathmaster.errors import ConfigurationError, DomainError, InstanceError
from pathmaster.mckv_sim import Snapshot
from pathmaster.path_measure import PathMeasure, TimeGrid


def start(N=200, M=20, T=1.0):
    return PathMeasure.constant(TimeGrid(T, M), np.zeros(N))


def terminal_mean(paths):
    return paths[:, -1, 0]


def test_table_feedback_bins_edges_downward():
    fb = TableFeedback([0.5], [0.0], [-1.0, 1.0])
    paths = np.array([-0.2, 0.0, 0.3])[:, None, None] * np.ones((1, 11, 1))
    snap = Snapshot(0.5, 5, 0.1, paths[:, :6])
    assert fb(snap).tolist() == [-1.0, -1.0, 1.0]


def test_table_feedback_rejects_future_observation():
    fb = TableFeedback([0.8], [0.0], [-1.0, 1.0])
    snap = Snapshot(0.5, 5, 0.1, np.zeros((3, 6, 1)))
    with pytest.raises(DomainError):
        fb(snap)


def test_table_feedback_shape_checks():
    with pytest.raises(ConfigurationError):
        TableFeedback([0.1, 0.2], [0.0], [1.0, 2.0])
    with pytest.raises(ConfigurationError):
        TableFeedback([0.1] * 5, [0.0], np.zeros((2,) * 5))


def test_piecewise_policy_validation():
    with pytest.raises(ConfigurationError):
        PiecewisePolicy([0.0, 0.5], [ConstantFeedback(0)])
    with pytest.raises(ConfigurationError):
        PiecewisePolicy([0.5, 0.5], [ConstantFeedback(0)] * 2)
    grid = TimeGrid(1.0, 10)
    with pytest.raises(DomainError):
        PiecewisePolicy([0.0, 0.55], [ConstantFeedback(0)] * 2).decision_indices(grid, 0)
    with pytest.raises(DomainError):
        PiecewisePolicy([0.1], [ConstantFeedback(0)]).decision_indices(grid, 0)


def test_interpolate_observed_is_linear_between_knots():
    grid = TimeGrid(1.0, 10)
    rng = np.random.default_rng(0)
    paths = rng.normal(size=(4, 11, 1))
    out = interpolate_observed(paths, grid, [0.0, 0.5, 1.0])
    assert np.allclose(out[:, [0, 5, 10]], paths[:, [0, 5, 10]])
    assert np.allclose(out[:, 2], 0.6 * paths[:, 0] + 0.4 * paths[:, 5])
    full = interpolate_observed(paths, grid, grid.times)
    assert np.allclose(full, paths)


def test_zero_cost_has_zero_value():
    est = evaluate_policy(0.0, start(), variance_dynamics(), None, lambda p: np.zeros(len(p)),
                          PiecewisePolicy([0.0], [ConstantFeedback(0.5)]))
    assert est.mean == 0.0 and est.stderr == 0.0


def test_constant_drift_shifts_mean_exactly():
    # the terminal mean under drift a is a (T - t) plus the average noise;
    # the policy difference on shared noise is deterministic
    mu = start()
    e1 = evaluate_policy(0.0, mu, variance_dynamics(), None, terminal_mean,
                         PiecewisePolicy([0.0], [ConstantFeedback(0.5)]))
    e0 = evaluate_policy(0.0, mu, variance_dynamics(), None, terminal_mean,
                         PiecewisePolicy([0.0], [ConstantFeedback(0.0)]))
    assert np.allclose(e1.values - e0.values, 0.5)


def test_running_cost_integrates_in_time():
    est = evaluate_policy(0.0, start(M=40, T=2.0), variance_dynamics(), lambda snap, a: a * a, None,
                          PiecewisePolicy([0.0], [ConstantFeedback(0.5)]))
    assert np.isclose(est.mean, 0.25 * 2.0)


def test_min_reps_and_worker_independence():
    pol = PiecewisePolicy([0.0], [FunctionFeedback(lambda s: -np.sign(s.state[:, 0]))])
    with pytest.raises(DomainError):
        evaluate_policy(0.0, start(), variance_dynamics(), None, neg_variance_cost, pol, reps=MIN_REPS - 1)
    a = evaluate_policy(0.0, start(), variance_dynamics(), None, neg_variance_cost, pol, seed=5, workers=1)
    b = evaluate_policy(0.0, start(), variance_dynamics(), None, neg_variance_cost, pol, seed=5, workers=4)
    assert np.array_equal(a.values, b.values)


def test_search_single_policy_and_enlargement():
    mu, dyn = start(N=300), variance_dynamics()
    one = TableSpace([(0.0, (), None)], [], [0.0])
    r1 = optimize_value(0.0, mu, dyn, None, neg_variance_cost, one)
    direct = evaluate_policy(0.0, mu, dyn, None, neg_variance_cost, one.policy((0,)))
    assert r1.estimate.mean == direct.mean and r1.evaluated == 1
    bigger = TableSpace([(0.0, (), None), (0.5, (0.5,), None)], [0.0], [0.0, -1.0, 1.0])
    r2 = optimize_value(0.0, mu, dyn, None, neg_variance_cost, bigger)
    assert r2.exhaustive and r2.estimate.mean >= r1.estimate.mean
    assert r2.estimate.mean > r1.estimate.mean + 3 * r1.estimate.stderr


def test_search_empty_space_and_coordinate_ascent():
    with pytest.raises(ConfigurationError):
        EnumeratedSpace([])
    with pytest.raises(ConfigurationError):
        TableSpace([(0.0, (), None)], [], [])
    mu, dyn = start(N=200), variance_dynamics()
    space = TableSpace([(0.0, (0.0,), None), (0.5, (0.5,), None)], [0.0], [-1.0, 0.0, 1.0])
    full = optimize_value(0.0, mu, dyn, None, neg_variance_cost, space, budget=len(space))
    ascent = optimize_value(0.0, mu, dyn, None, neg_variance_cost, space, budget=40)
    assert full.exhaustive and not ascent.exhaustive
    assert ascent.evaluated <= 40
    assert ascent.estimate.mean <= full.estimate.mean


def test_two_point_start_requires_even_size():
    with pytest.raises(DomainError):
        two_point_start(0.1, 3)


def test_dpp_closed_loop_small():
    acts = [-1.0, 1.0]
    mu = start(N=400, M=20, T=2.0)
    first = TableSpace([(0.0, (0.0,), None)], [0.0], acts)
    second = TableSpace([(1.0, (1.0,), None)], [0.0], acts)
    rep = dpp_residual(0.0, 1.0, mu, variance_dynamics(), None, neg_variance_cost, first, second, second,
                       seed=2, reps=8)
    assert rep.within
    with pytest.raises(DomainError):
        dpp_residual(1.0, 1.0, mu, variance_dynamics(), None, neg_variance_cost, first, second, second)


def test_state_dependence_rejects_different_marginals():
    mu_a, _ = route_measures(N=20)
    shifted = PathMeasure(mu_a.grid, mu_a.values + 0.1)
    space = TableSpace([(0.5, (0.5,), None)], [0.0], [-1.0, 1.0])
    with pytest.raises(InstanceError):
        state_dependence_check(0.5, mu_a, shifted, variance_dynamics(), None, neg_variance_cost, space)


def test_route_measures_share_marginal_not_history():
    a, b = route_measures(N=10)
    assert np.array_equal(a.marginal(0.5), b.marginal(0.5))
    assert np.max(np.abs(a.values - b.values)) > 1.0
    assert np.max(running_max_cost(a.values)) < np.max(running_max_cost(b.values))


def test_policy_class_convergence_constant_feedback():
    mu = start(N=200, M=16)
    rep = policy_class_convergence(0.5, mu, variance_dynamics(), None, neg_variance_cost,
                                   path_feedback=lambda p, g: np.full(len(p), 0.3), ms=(1, 2, 4))
    assert rep.passed
    assert all(r["error"] == 0.0 for r in rep.rows)


def test_policy_class_convergence_integral_feedback():
    mu = PathMeasure(TimeGrid(1.0, 32), np.cumsum(np.random.default_rng(1).normal(0, 0.2, (400, 33, 1)),
                                                 axis=1) - np.random.default_rng(1).normal(0, 0.2, (400, 1, 1)))
    rep = policy_class_convergence(0.5, mu, variance_dynamics(), None, neg_variance_cost,
                                   path_feedback=integral_feedback(0.5, 4.0), ms=(1, 2, 4, 8, 16))
    assert rep.rows[-1]["error"] == 0.0
    with pytest.raises(DomainError):
        policy_class_convergence(0.5, mu, variance_dynamics(), None, neg_variance_cost, ms=(3,))
