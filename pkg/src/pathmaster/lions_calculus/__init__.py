"""Pathwise Lions derivatives by single-atom difference quotients, and an Ito residual check."""

from .derivatives import (bumped, bumped_after, default_eps, eps_sweep, lions_derivative,
                          numeric_dmu, numeric_dwdmu, second_pathwise_derivative,
                          time_derivative)
from .functional import MeasureFunctional, moment_functional, running_integral
from .ito import ItoReport, ito_residual

__all__ = [
    "ItoReport", "MeasureFunctional", "bumped", "bumped_after", "default_eps", "eps_sweep",
    "ito_residual", "lions_derivative", "moment_functional", "numeric_dmu", "numeric_dwdmu",
    "running_integral", "second_pathwise_derivative", "time_derivative",
]
