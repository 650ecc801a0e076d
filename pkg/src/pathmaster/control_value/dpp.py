"""Dynamic programming residuals on a two-stage split of the horizon."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from ..mckv_sim import simulate_trajectory
from .evaluate import realized_cost
from .policies import PiecewisePolicy, TableSpace


@dataclass
class DPPReport:
    residual: float
    stderr: float
    joint: np.ndarray = field(repr=False)
    nested: np.ndarray = field(repr=False)
    joint_configs: list = field(default_factory=list, repr=False)
    nested_configs: list = field(default_factory=list, repr=False)

    @property
    def within(self):
        return abs(self.residual) <= 3 * self.stderr


def _best(values):
    """Index of the largest value; ties to the lowest index."""
    return int(np.argmax(values))


def dpp_residual(t1, t2, mu, dyn, f, g, first, second_joint, second_nested, N=None, seed=0, reps=8):
    """Joint optimum on [t1, T] minus the nested optimum through t2.

    ``first`` is a TableSpace of single-interval policies starting at t1.
    ``second_joint`` and ``second_nested`` are TableSpaces of single-interval
    policies starting at t2: the first is what the joint problem may use
    after t2, the second what a fresh problem started at t2 may use.  When
    the two classes carry the same information the residual is zero up to
    Monte Carlo error; when the fresh problem sees less, it is positive.

    Per replication r the joint side maximizes over all pairs on stream
    (r, 0).  The nested side simulates each first-stage policy to t2 on
    stream (r, 1), hands the particle output to a fresh problem on stream
    (r, 2), and maximizes over first stages of the best second-stage value.
    Both sides are maxima of noisy estimates, with the same structure.
    """
    if not t1 < t2 <= mu.grid.T:
        raise DomainError("need t1 < t2 <= T")
    for sp in (first, second_joint, second_nested):
        if not isinstance(sp, TableSpace) or len(sp.intervals) != 1:
            raise DomainError("each stage space must be a single-interval TableSpace")
    firsts = [first.policy(c) for c in first.all_configs()]
    seconds_j = [second_joint.policy(c) for c in second_joint.all_configs()]
    seconds_n = [second_nested.policy(c) for c in second_nested.all_configs()]
    joint_vals, nested_vals, jc, nc = [], [], [], []
    for r in range(reps):
        best_joint = []
        for p1 in firsts:
            row = []
            for p2 in seconds_j:
                pol = PiecewisePolicy(p1.breakpoints + p2.breakpoints, p1.feedbacks + p2.feedbacks)
                traj = simulate_trajectory(t1, mu, dyn, pol, N=N, seed=seed, stream=(r, 0))
                row.append(realized_cost(traj, f, g))
            best_joint.append(row)
        best_joint = np.array(best_joint)
        i, j = np.unravel_index(_best(best_joint.ravel()), best_joint.shape)
        joint_vals.append(best_joint[i, j])
        jc.append((int(i), int(j)))

        stage_vals = []
        for p1 in firsts:
            traj1 = simulate_trajectory(t1, mu, dyn, p1, N=N, seed=seed, stream=(r, 1), horizon=t2)
            running = realized_cost(_truncate(traj1, t2), f, None)
            P = traj1.measure
            vals = [realized_cost(simulate_trajectory(t2, P, dyn, p2, seed=seed, stream=(r, 2)), f, g)
                    for p2 in seconds_n]
            stage_vals.append(running + max(vals))
        k = _best(stage_vals)
        nested_vals.append(stage_vals[k])
        nc.append(k)
    diff = np.array(joint_vals) - np.array(nested_vals)
    return DPPReport(float(diff.mean()), float(diff.std(ddof=1) / np.sqrt(reps)),
                     np.array(joint_vals), np.array(nested_vals), jc, nc)


def _truncate(traj, t2):
    """Trajectory view keeping only the steps before t2 (for the first-stage running cost)."""
    from ..mckv_sim import Trajectory
    steps = traj.grid.index_at(t2) - traj.start
    acts = None if traj.actions is None else traj.actions[:, :steps]
    return Trajectory(traj.measure, traj.start, traj.increments[:, :steps], traj.drift[:, :steps],
                      traj.diffusion[:, :steps], acts, traj.audit)
