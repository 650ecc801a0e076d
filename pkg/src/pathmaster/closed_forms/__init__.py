"""Reference functionals, solutions and control instances with known answers.

Entries are looked up by stable string ids through ``lookup``.
"""

from ..errors import ConfigurationError
from .counterexamples import (counterexample_instances, neg_variance_cost, quartic_branch_value,
                              quartic_cost, quartic_dynamics, running_max_cost, variance_dynamics)
from .distortion import distortion_value, distortion_value_mc, get_distortion, layer_cake
from .entry import ReferenceEntry
from .heat import heat_solution, heat_value_mc, terminal_draws
from .quadratic import example_quadratic
from .semilinear import get_nonlinearity, semilinear_solution


def lookup(entry_id, **params):
    """Build an entry from ids such as ``quadratic``, ``heat/terminal_square/zero``,
    ``distortion/reverse_s`` or ``semilinear/half_square/neg_logcosh``."""
    head, *rest = entry_id.split("/")
    try:
        if head == "quadratic" and not rest:
            return example_quadratic()
        if head == "heat" and 1 <= len(rest) <= 2:
            return heat_solution(*rest, **params)
        if head == "distortion" and len(rest) == 1:
            return distortion_value(rest[0], **params)
        if head == "semilinear" and len(rest) == 2:
            return semilinear_solution(rest[0], rest[1], **params)
        if head in ("variance", "quartic") and not rest:
            return {e.id: e for e in counterexample_instances()}[head]
    except TypeError as exc:
        raise ConfigurationError(f"bad parameters for {entry_id!r}: {exc}") from None
    raise ConfigurationError(f"unknown reference entry {entry_id!r}")


__all__ = [
    "ReferenceEntry", "counterexample_instances", "distortion_value", "distortion_value_mc",
    "example_quadratic", "get_distortion", "get_nonlinearity", "heat_solution", "heat_value_mc",
    "layer_cake", "lookup", "neg_variance_cost", "quartic_branch_value", "quartic_cost",
    "quartic_dynamics", "running_max_cost", "semilinear_solution", "terminal_draws",
    "variance_dynamics",
]
