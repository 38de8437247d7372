"""Module for formulation and solver vocabulary."""

from enum import Enum


class Formulation(Enum):
    """Reconstruction formulations."""

    MF = "mf"
    MF_ALPHA = "mf-alpha"
    MF4 = "mf4"
    MF4_ALPHA = "mf4-alpha"
    QR = "qr"

    @property
    def is_first_order(self) -> bool:
        """Whether the formulation works on the pair (y, p)."""
        return self in (Formulation.MF4, Formulation.MF4_ALPHA)

    @property
    def is_stabilized(self) -> bool:
        """Whether the formulation carries a C block."""
        return self in (Formulation.MF_ALPHA, Formulation.MF4_ALPHA)


class SolverMethod(Enum):
    """How a saddle-point system is solved."""

    DIRECT = "direct"
    DUAL = "dual"


class MultiplierKind(Enum):
    """Multiplier spaces for the second-order formulation."""

    P0 = "p0"
    Q1 = "q1"
    HERMITE = "hermite"
