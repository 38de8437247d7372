"""Second-order mixed formulations, the quasi-reversibility baseline and the direct solver."""

from heatrecon.secondorder.forms import FormContext
from heatrecon.secondorder.formulations import (
    assemble_mf,
    assemble_mf_alpha,
    hermite_primal_space,
    make_context,
    multiplier_space,
)
from heatrecon.secondorder.quasi_reversibility import assemble_qr, solve_qr
from heatrecon.secondorder.solve import Renormalization, SolveOptions, apply_renormalization, solve_saddle
from heatrecon.secondorder.system import Penalty, ReconstructionReport, SaddleSystem, build_report

__all__ = [
    "FormContext",
    "Penalty",
    "ReconstructionReport",
    "Renormalization",
    "SaddleSystem",
    "SolveOptions",
    "apply_renormalization",
    "assemble_mf",
    "assemble_mf_alpha",
    "assemble_qr",
    "build_report",
    "hermite_primal_space",
    "make_context",
    "multiplier_space",
    "solve_qr",
    "solve_saddle",
]
