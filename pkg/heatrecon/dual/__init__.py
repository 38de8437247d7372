"""Dual operators and the conjugate-gradient minimization of the dual functional."""

from heatrecon.dual.cg import dual_functional, minimize_dual
from heatrecon.dual.operator import DualOperator, apply_Tr, apply_Tr_mixed, spectrum

__all__ = ["DualOperator", "apply_Tr", "apply_Tr_mixed", "dual_functional", "minimize_dual", "spectrum"]
