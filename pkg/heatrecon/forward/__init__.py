"""Forward solvers and the data of the parabolic equation."""

from heatrecon.forward.coefficients import Coefficients
from heatrecon.forward.energy import EstimateReport, verify_energy_estimate
from heatrecon.forward.field import Field
from heatrecon.forward.solvers import solve_forward, solve_forward_mixed

__all__ = ["Coefficients", "EstimateReport", "Field", "solve_forward", "solve_forward_mixed", "verify_energy_estimate"]
