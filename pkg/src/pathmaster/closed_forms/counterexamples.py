"""Two mean-field control instances whose value functions misbehave.

Costs are given per particle: ``g(paths)`` maps (N, M+1, 1) path arrays to
(N,) values whose mean is the measure-dependent terminal cost.

``variance_instance``
    drift a in [-1, 1], unit vol, g(mu) = -Var(X_T).  Controls that only see
    the noise after t cannot reduce the variance already present at t, so
    their value is at most -Var(X_t); feedback on the state can.
``quartic_instance``
    no drift, vol 1 + a^2, T = 1, g(mu) = E[X_1^4]/3 - E[X_1^2]^2, controls
    fixed at time 0 as a function of X_0.  The value jumps at the point mass
    at 0: any constant control gives exactly 0 there, while splitting a
    symmetric two-point law by sign gives about 9/4.
"""

import numpy as np

from ..mckv_sim import ActionSet, DynamicsSpec
from .entry import ReferenceEntry


def neg_variance_cost(paths):
    x = paths[:, -1, 0]
    return -(x - x.mean()) ** 2


def quartic_cost(paths):
    x = paths[:, -1, 0]
    return x ** 4 / 3 - x * x * np.mean(x * x)


def running_max_cost(paths):
    return np.max(paths[:, :, 0], axis=1)


def variance_dynamics():
    return DynamicsSpec(drift=lambda s, a: np.asarray(a, dtype=float)[:, None],
                        vol=lambda s, a: 1.0, d=1, L=1.0, C0=1.0,
                        actions=ActionSet.interval(-1.0, 1.0, 9), name="drift_control")


def quartic_dynamics(actions=(-1.0, -0.5, 0.0, 0.5, 1.0)):
    return DynamicsSpec(drift=lambda s, a: np.zeros((s.N, 1)),
                        vol=lambda s, a: 1.0 + np.asarray(a, dtype=float) ** 2, d=1, L=2.0, C0=2.0,
                        actions=ActionSet(actions, -1.0, 1.0), name="vol_control")


def quartic_branch_value(eps, a_pos, a_neg):
    """Exact cost for the law 1/2 delta_eps + 1/2 delta_-eps with actions a_pos (X_0 > 0), a_neg.

    Uses E[(x + cB)^2] = x^2 + c^2 and E[(x + cB)^4] = x^4 + 6 x^2 c^2 + 3 c^4.
    """
    m2 = m4 = 0.0
    for x, a in ((eps, a_pos), (-eps, a_neg)):
        c = 1 + a * a
        m2 += 0.5 * (x * x + c * c)
        m4 += 0.5 * (x ** 4 + 6 * x * x * c * c + 3 * c ** 4)
    return m4 / 3 - m2 * m2


def counterexample_instances():
    variance = ReferenceEntry(
        "variance", note="value gap between noise-adapted and state-feedback controls",
        meta={"dynamics": variance_dynamics, "g": neg_variance_cost, "f": None, "d": 1,
              "actions": (-1.0, 1.0),
              "noise_adapted_bound": lambda T, t: -(T - t) ** 2,
              "feedback_lower": lambda T, t: -(T - t),
              "gap": lambda T, t: (T - t) ** 2 - (T - t),
              "zero_control_value": lambda T, t: -(T - t) - (T - t) ** 2,
              "requires": "T - t > 1"})
    quartic = ReferenceEntry(
        "quartic", note="value discontinuous at the point mass at 0",
        meta={"dynamics": quartic_dynamics, "g": quartic_cost, "f": None, "d": 1, "T": 1.0,
              "value_at_point_mass": 0.0, "gap_target": 2.0,
              "branch_value": quartic_branch_value,
              "branch_polynomial": lambda eps: 9 / 4 - 2 * eps ** 4 / 3,
              "stated_branch_polynomial": lambda eps: 9 / 4 - 2 * eps ** 2 - 2 * eps ** 4 / 3})
    return [variance, quartic]
