"""Weight families of the reconstruction problem."""

from heatrecon.weights.beta import BetaProfile, build_beta
from heatrecon.weights.domination import DominationReport, check_domination
from heatrecon.weights.family import WeightFamily, carleman_log_inverse, eval_inverse_weight

__all__ = [
    "BetaProfile",
    "DominationReport",
    "WeightFamily",
    "build_beta",
    "carleman_log_inverse",
    "check_domination",
    "eval_inverse_weight",
]
