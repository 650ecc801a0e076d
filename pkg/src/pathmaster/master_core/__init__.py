"""Master-equation generators, classical residuals, semi-jets and viscosity checks."""

from .generators import (GeneratorSpec, expectation_form, heat_generator, hjb_generator,
                         lipschitz_audit, monotonicity_audit, semilinear_generator,
                         zero_generator)
from .jets import (JetSpec, MembershipReport, jet_membership_test, paraboloid_eval,
                   paraboloid_functional, true_jet)
from .solutions import CandidateSolution, classical_residual, exponential_change
from .viscosity import ViscosityReport, viscosity_check

__all__ = [
    "CandidateSolution", "GeneratorSpec", "JetSpec", "MembershipReport", "ViscosityReport",
    "classical_residual", "expectation_form", "exponential_change", "heat_generator",
    "hjb_generator", "jet_membership_test", "lipschitz_audit", "monotonicity_audit",
    "paraboloid_eval", "paraboloid_functional", "semilinear_generator", "true_jet",
    "viscosity_check", "zero_generator",
]
