"""
Noise-adapted controls lose to state feedback
=============================================

Drift control with terminal cost -Var(X_T) from a start whose time-t
marginal is (T - t) sign(B_t).  A feedback that reads the state can
cancel the spread and reach -(T - t); a control that only sees the noise
after t cannot, and is stuck near -(T - t)^2.
"""

import numpy as np

from pathmaster.control_value import openloop_gap_experiment

rep = openloop_gap_experiment(T=3.0, t=1.0, N=4000, reps=8)
for row in rep.rows:
    print(f"{row['quantity']:>38}  {row['estimate']:8.4f} +- {row['stderr']:.4f}")
print(rep.summary())

# small-time ratio h(s)/s against its leading-order prediction
for s in (0.1, 0.01, 0.001):
    print(f"s={s:<6} -1 + (4/3) sqrt(2/pi) sqrt(s) = {-1 + 4 / 3 * np.sqrt(2 / np.pi) * np.sqrt(s):.3f}")
