"""Module for finite-element vocabulary."""

from enum import Enum


class BasisKind(Enum):
    """Finite-element families available on the space-time grid."""

    HERMITE_C1_TENSOR = "hermite"
    BILINEAR_Q1 = "q1"
    PIECEWISE_CONSTANT_P0 = "p0"


class Derivative(Enum):
    """Partial derivatives a basis tabulation can provide."""

    VALUE = "value"
    DX = "dx"
    DT = "dt"
    DXX = "dxx"
