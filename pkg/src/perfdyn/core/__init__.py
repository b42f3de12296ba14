from .closed_forms import (
    gaussian_weighted_exp_mean,
    gaussian_weighted_exp_sq_mean,
    geometric_triangular_inverse_apply,
    jordan_chain_matrix,
    mixed_power_bound_check,
    triangular_solve_apply,
)
from .divergences import (
    SharedCovChi2,
    chi2_exact_discrete,
    chi2_gaussian_shared_cov,
    chi2_gaussian_textbook,
    chi2_monte_carlo,
    w1_gaussian_bound,
    weighted_norm_sq,
)
from .rng import spawn
from .types import DiscreteDistribution, GaussianSpec, SensitivityParams, WeightedNormSpec

__all__ = [
    "DiscreteDistribution",
    "GaussianSpec",
    "SensitivityParams",
    "SharedCovChi2",
    "WeightedNormSpec",
    "chi2_exact_discrete",
    "chi2_gaussian_shared_cov",
    "chi2_gaussian_textbook",
    "chi2_monte_carlo",
    "gaussian_weighted_exp_mean",
    "gaussian_weighted_exp_sq_mean",
    "geometric_triangular_inverse_apply",
    "jordan_chain_matrix",
    "mixed_power_bound_check",
    "spawn",
    "triangular_solve_apply",
    "w1_gaussian_bound",
    "weighted_norm_sq",
]
