"""Closed-loop policies, Monte Carlo values, policy search and the control experiments."""

from .dpp import DPPReport, dpp_residual
from .evaluate import (MIN_REPS, SearchResult, ValueEstimate, default_workers, evaluate_policy,
                       optimize_value, realized_cost)
from .experiments import (ExperimentReport, discontinuity_experiment, integral_feedback,
                          openloop_gap_experiment, policy_class_convergence, route_measures,
                          signed_start, state_dependence_check, two_point_start)
from .policies import (ConstantFeedback, DiscretePathPolicy, EnumeratedSpace, FunctionFeedback,
                       PiecewisePolicy, TableFeedback, TableSpace, interpolate_observed)

__all__ = [
    "ConstantFeedback", "DPPReport", "DiscretePathPolicy", "EnumeratedSpace", "ExperimentReport",
    "FunctionFeedback", "MIN_REPS", "PiecewisePolicy", "SearchResult", "TableFeedback",
    "TableSpace", "ValueEstimate", "default_workers", "discontinuity_experiment", "dpp_residual",
    "evaluate_policy", "integral_feedback", "interpolate_observed", "openloop_gap_experiment",
    "optimize_value", "policy_class_convergence", "realized_cost", "route_measures",
    "signed_start", "state_dependence_check", "two_point_start",
]
