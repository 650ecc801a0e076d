"""
A value function that jumps at a point mass
===========================================

Volatility control with cost E[X^4]/3 - (E[X^2])^2.  Starting from the
point mass at 0 every particle sees the same state, so a feedback cannot
split them and the value is 0.  Start instead from +-eps with equal
weights and the controller can give the two halves different
volatilities, which pushes the value above 2 however small eps is.
"""

from pathmaster.closed_forms import quartic_branch_value
from pathmaster.control_value import discontinuity_experiment

rep = discontinuity_experiment(eps=0.1, N=50_000, reps=8)
for row in rep.rows:
    target = row.get("target", "")
    print(f"{row['quantity']:>12}  {row['estimate']:8.4f} +- {row['stderr']:.4f}  target {target}")
print(rep.summary())

# the best branch keeps the exact value 9/4 - (2/3) eps^4 as eps shrinks
for eps in (0.5, 0.1, 0.01, 0.0):
    print(f"eps={eps:<5} best branch {quartic_branch_value(eps, 1.0, 0.0):.6f}")
