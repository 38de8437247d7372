"""Module for discrete fields on the space-time grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from heatrecon.enums.spaces import Derivative
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.grid.spaces import FemSpace, at_quadrature, evaluate


@dataclass(frozen=True, eq=False)
class Field:
    """A finite-element function: a space and its full DOF vector.

    Constrained DOFs are exactly zero.
    """

    space: FemSpace
    values: np.ndarray

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.space.n_dofs,):
            raise ValueError(f"expected {self.space.n_dofs} DOF values, got shape {values.shape}")
        if np.any(values[self.space.constrained] != 0.0):
            raise ValueError("constrained DOFs of a field must be zero")
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, space: FemSpace) -> Field:
        return cls(space, np.zeros(space.n_dofs))

    @classmethod
    def from_free(cls, space: FemSpace, free_values: np.ndarray) -> Field:
        """Builds a field from the values of its unconstrained DOFs."""
        return cls(space, space.extend(free_values))

    @property
    def free_values(self) -> np.ndarray:
        return self.space.restrict(self.values)

    def at_quadrature(self, quadrature: QuadratureSet, derivative: Derivative = Derivative.VALUE) -> np.ndarray:
        """Samples at every quadrature point, shape (n_cells, nq)."""
        return at_quadrature(self.space, self.values, quadrature, derivative)

    def evaluate(self, x: np.ndarray, t: np.ndarray, derivative: Derivative = Derivative.VALUE) -> np.ndarray:
        return evaluate(self.space, self.values, x, t, derivative)

    def scaled(self, factor: float) -> Field:
        return Field(self.space, factor * self.values)

    def norm(
        self,
        quadrature: QuadratureSet,
        inverse_weight: np.ndarray | None = None,
        cells: np.ndarray | None = None,
        derivative: Derivative = Derivative.VALUE,
    ) -> float:
        """Weighted L2 norm, sqrt(sum w^{-2} v^2), over the grid or a subset of cells.

        Args:
            quadrature: quadrature of the field's grid.
            inverse_weight: samples of w^{-1} at the quadrature points of the selected cells.
            cells: optional flat cell indices.
            derivative: which derivative of the field to measure.
        """
        values = self.at_quadrature(quadrature, derivative)
        if cells is not None:
            values = values[cells]
        if inverse_weight is not None:
            values = inverse_weight * values
        return float(np.sqrt(quadrature.integrate(values**2, cells)))
