"""Weighted norms, inf-sup estimates, multiplier consistency and a-priori estimates."""

from heatrecon.diagnostics.consistency import mixed_multiplier_consistency, multiplier_consistency
from heatrecon.diagnostics.estimates import (
    AlphaEstimate,
    alpha_estimate,
    coincidence_gap,
    observation_bound,
    observation_ceiling,
    theta1,
    theta1_mixed,
    theta2,
)
from heatrecon.diagnostics.infsup import (
    discrete_infsup,
    estimate_infsup,
    infsup_constant_mf,
    infsup_constant_mf4,
    multiplier_bound,
)
from heatrecon.diagnostics.norms import NormReport, energy_norms, weighted_errors, weighted_norms

__all__ = [
    "AlphaEstimate",
    "NormReport",
    "alpha_estimate",
    "coincidence_gap",
    "discrete_infsup",
    "energy_norms",
    "estimate_infsup",
    "infsup_constant_mf",
    "infsup_constant_mf4",
    "mixed_multiplier_consistency",
    "multiplier_bound",
    "multiplier_consistency",
    "observation_bound",
    "observation_ceiling",
    "theta1",
    "theta1_mixed",
    "theta2",
    "weighted_errors",
    "weighted_norms",
]
