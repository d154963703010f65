"""
Weighted Chi2 - exact distribution of weighted sums of chi-squared variables

This package computes the density and distribution function of
X = sum_j weight_j * chi2(dof_j) (nonzero real weights, even dofs) from the
partial-fraction decomposition of its moment generating function, and checks
the result against Monte Carlo and characteristic-function inversion.
"""

__version__ = "1.0"

from .errors import (
    CoefficientOverflowError,
    CoincidentPolesError,
    ConvergenceError,
    DomainError,
    OracleConvergenceError,
    SpecError,
    WeightedChi2Error,
)
from .model import (
    MgfDomain,
    Term,
    WeightedSumSpec,
    characteristic_function,
    mean_variance,
    mgf,
    mgf_domain,
)
from .partial_fractions import (
    PartialFractionExpansion,
    PoleGroup,
    coefficients_general,
    coefficients_three_term,
    coefficients_two_term,
    expand,
    merge_weights,
    reconstruct_mgf,
)
from .distribution import EvaluationTable, GammaComponent, cdf, components, evaluate_grid, pdf, sf
from .oracles import OracleEstimate, OracleMethod, cf_inversion_cdf, monte_carlo_cdf
from .special_functions import ln_gamma, regularized_lower_gamma, regularized_upper_gamma

__all__ = [
    "WeightedChi2Error",
    "SpecError",
    "DomainError",
    "CoincidentPolesError",
    "CoefficientOverflowError",
    "ConvergenceError",
    "OracleConvergenceError",
    "Term",
    "WeightedSumSpec",
    "MgfDomain",
    "mgf",
    "mgf_domain",
    "characteristic_function",
    "mean_variance",
    "PoleGroup",
    "PartialFractionExpansion",
    "merge_weights",
    "coefficients_two_term",
    "coefficients_three_term",
    "coefficients_general",
    "expand",
    "reconstruct_mgf",
    "GammaComponent",
    "EvaluationTable",
    "components",
    "pdf",
    "cdf",
    "sf",
    "evaluate_grid",
    "OracleMethod",
    "OracleEstimate",
    "monte_carlo_cdf",
    "cf_inversion_cdf",
    "ln_gamma",
    "regularized_lower_gamma",
    "regularized_upper_gamma",
]
