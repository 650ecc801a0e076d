import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pathmaster.errors import DomainError, ShapeError, SimulationFault
from pathmaster.mckv_sim import (ActionSet, BrownianDriver, DynamicsSpec, constant_dynamics, iter_PL,
                                 moment_bound_check, sample_PL, simulate_mkv, simulate_trajectory)
from pathmaster.path_measure import PathMeasure, TimeGrid


def point_mass(N=100, M=20, T=1.0, x=0.0):
    return PathMeasure.constant(TimeGrid(T, M), np.full(N, x))


def test_deterministic_drift_is_exact():
    mu = point_mass(N=3, M=10)
    out = simulate_mkv(0.0, mu, constant_dynamics(b=2.0, s=0.0))
    assert np.allclose(out.values[:, -1, 0], 2.0)
    assert np.allclose(out.values[0, :, 0], 2.0 * mu.grid.times)


def test_copies_history_before_t(brownian):
    mu = brownian(N=20, M=10)
    out = simulate_mkv(0.4, mu, constant_dynamics(0.0, 1.0), seed=3)
    assert np.array_equal(out.values[:, :5], mu.values[:, :5])
    assert not np.array_equal(out.values[:, 5:], mu.values[:, 5:])


def test_seeded_reproducibility_and_streams():
    mu = point_mass()
    dyn = constant_dynamics(0.0, 1.0)
    a = simulate_mkv(0.0, mu, dyn, seed=7)
    assert a == simulate_mkv(0.0, mu, dyn, seed=7)
    assert a != simulate_mkv(0.0, mu, dyn, seed=7, stream=1)
    assert a != simulate_mkv(0.0, mu, dyn, seed=8)


def test_common_noise_across_drifts():
    mu = point_mass(N=50)
    a = simulate_mkv(0.0, mu, constant_dynamics(0.0, 1.0), seed=1)
    b = simulate_mkv(0.0, mu, constant_dynamics(1.0, 1.0), seed=1)
    assert np.allclose(b.values - a.values, mu.grid.times[None, :, None])


def test_increments_have_brownian_scale():
    mu = point_mass(N=20000, M=4)
    traj = simulate_trajectory(0.0, mu, constant_dynamics(0.0, 2.0), seed=0)
    var = traj.increments.var(axis=0).ravel()
    assert np.allclose(var, 4.0 * mu.grid.dt, rtol=0.05)
    assert np.allclose(traj.diffusion, 4.0)


def test_bootstrap_particle_count():
    mu = point_mass(N=10)
    out = simulate_mkv(0.0, mu, constant_dynamics(0.0, 1.0), N=37)
    assert out.N == 37


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        simulate_mkv(0.0, point_mass(), constant_dynamics(0.0, 1.0, d=2))


def test_blowup_reports_step():
    dyn = DynamicsSpec(drift=lambda s, a: np.exp(np.exp(s.state * 50.0)), vol=lambda s, a: 0.0)
    with pytest.raises(SimulationFault) as info, np.errstate(over="ignore"):
        simulate_mkv(0.0, point_mass(x=1.0), dyn)
    assert info.value.step is not None


class Recorder:
    """Policy that records how much history it was shown."""

    def __init__(self):
        self.seen = []

    def decision_indices(self, grid, k0):
        return [(k, 0) for k in range(k0, grid.M)]

    def decide(self, i, snap):
        self.seen.append((snap.k, snap.paths.shape[1]))
        return np.zeros(snap.N)


def test_policy_sees_only_the_past():
    rec = Recorder()
    dyn = DynamicsSpec(drift=lambda s, a: a[:, None], vol=lambda s, a: 1.0,
                       actions=ActionSet.interval(-1, 1))
    simulate_trajectory(0.0, point_mass(M=6), dyn, rec)
    assert all(length == k + 1 for k, length in rec.seen)


def test_actions_outside_set_rejected():
    class Bad(Recorder):
        def decide(self, i, snap):
            return np.full(snap.N, 2.0)
    dyn = DynamicsSpec(drift=lambda s, a: a[:, None], vol=lambda s, a: 1.0,
                       actions=ActionSet.interval(-1, 1))
    with pytest.raises(DomainError):
        simulate_trajectory(0.0, point_mass(), dyn, Bad())


def test_driver_keys_are_independent():
    d = BrownianDriver(0, 1)
    assert not np.array_equal(d.normals(0, 5, 1), d.normals(1, 5, 1))
    assert np.array_equal(d.normals(3, 5, 1), BrownianDriver(0, (1,)).normals(3, 5, 1))


@given(st.floats(0.1, 3.0), st.integers(0, 50))
def test_pl_samples_agree_before_t_and_respect_bounds(L, seed):
    mu = point_mass(N=8, M=10)
    t = 0.3
    for P, _ in iter_PL(t, mu, L, 3, seed=seed):
        assert np.array_equal(P.values[:, :4], mu.values[:, :4])
    sample = sample_PL(t, mu, L, 3, family="drift_pm", seed=seed)
    for P in sample:
        steps = np.diff(P.values[:, 3:, 0], axis=1)
        assert np.allclose(np.abs(steps), L * mu.grid.dt)


def test_pl_freezes_after_horizon():
    mu = point_mass(N=5, M=10)
    for P in sample_PL(0.2, mu, 1.0, 4, family="unit_vol", horizon=0.5):
        assert np.all(P.values[:, 5:] == P.values[:, 5:6])


def test_pl_clamps_raw_coefficients():
    from pathmaster.mckv_sim import SemimartingaleSpec
    spec = SemimartingaleSpec(lambda s: np.full((s.N, 1), 10.0), lambda s: 10.0, L=1.0)
    out = simulate_mkv(0.0, point_mass(N=4, M=5), spec.dynamics())
    assert spec.audit["clamped"] > 0
    assert np.all(np.isfinite(out.values))


def test_pl_rejects_bad_bound():
    with pytest.raises(DomainError):
        sample_PL(0.0, point_mass(), 0.0, 2)


def test_moment_bound_scaling():
    mu = point_mass(N=2000, M=200)
    meas = [simulate_mkv(0.0, mu, constant_dynamics(0.0, 1.0), seed=0)]
    rep = moment_bound_check(meas, 0.0, L=0.5, p=2)
    assert abs(rep.exponent - 1.0) < 0.15
    assert rep.bound_holds
    with pytest.raises(DomainError):
        moment_bound_check(meas, 0.0, 1.0, p=3)
