"""Module for the quantities shared by every assembled formulation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sps

from heatrecon.enums.spaces import Derivative
from heatrecon.enums.weights import Member
from heatrecon.errors import UnsupportedSpace
from heatrecon.forward.coefficients import CoefficientSamples, Coefficients, sample_coefficients
from heatrecon.forward.field import Field
from heatrecon.grid.assembly import assemble_bilinear, assemble_linear, assemble_symmetric, restrict_matrix
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.grid.spaces import FemSpace, quadrature_tables
from heatrecon.observe.observation import ObservationSet
from heatrecon.weights.family import WeightFamily


@dataclass(frozen=True, eq=False)
class FormContext:
    """Weights, coefficients and observations sampled once on the assembly quadrature.

    Attributes:
        quadrature: the assembly quadrature.
        family: the weight family.
        obs: the observation, on the same quadrature.
        coeffs: the coefficients.
    """

    quadrature: QuadratureSet
    family: WeightFamily
    obs: ObservationSet
    coeffs: Coefficients

    def __post_init__(self) -> None:
        self.obs.check_layout(self.quadrature)

    @property
    def grid(self) -> SpaceTimeGrid:
        return self.quadrature.grid

    @cached_property
    def samples(self) -> CoefficientSamples:
        return sample_coefficients(self.coeffs, self.quadrature)

    def inverse(self, member: Member) -> np.ndarray:
        """w^{-1} at every quadrature point."""
        return self.family.at_quadrature(member, self.quadrature)

    @cached_property
    def rho_inv(self) -> np.ndarray:
        return self.inverse(Member.RHO)

    @cached_property
    def rho0_inv(self) -> np.ndarray:
        return self.inverse(Member.RHO0)

    @cached_property
    def rho1_inv(self) -> np.ndarray:
        return self.inverse(Member.RHO1)

    @property
    def weights(self) -> np.ndarray:
        return self.quadrature.w

    def tables(self, space: FemSpace, *derivatives: Derivative) -> dict[Derivative, np.ndarray]:
        return quadrature_tables(space, self.quadrature, derivatives)

    def operator(self, space: FemSpace, adjoint: bool = False) -> np.ndarray:
        """Samples of L phi_i (or L* phi_i) for every local basis function, (n_cells, nq, n_local).

        L y = y_t - c y_xx - c_x y_x + d y and L* phi = -phi_t - c phi_xx - c_x phi_x + d phi.

        Raises:
            UnsupportedSpace: if the space has no second x-derivative.
        """
        if not space.supports(Derivative.DXX):
            raise UnsupportedSpace(f"{space.kind.name} space cannot represent L: no d2/dx2")
        tab = self.tables(space, Derivative.VALUE, Derivative.DX, Derivative.DT, Derivative.DXX)
        s = self.samples
        sign = -1.0 if adjoint else 1.0
        return (
            sign * tab[Derivative.DT][None]
            - s.c[..., None] * tab[Derivative.DXX][None]
            - s.c_x[..., None] * tab[Derivative.DX][None]
            + s.d[..., None] * tab[Derivative.VALUE][None]
        )

    def apply_operator(self, field: Field, adjoint: bool = False) -> np.ndarray:
        """L y (or L* y) at every quadrature point, (n_cells, nq)."""
        table = self.operator(field.space, adjoint)
        return np.einsum("cqi,ci->cq", table, field.values[field.space.cell_dofs])

    def values(self, space: FemSpace) -> np.ndarray:
        return self.tables(space, Derivative.VALUE)[Derivative.VALUE]

    @property
    def obs_cells(self) -> np.ndarray:
        return self.obs.cells

    def observation_block(self, space: FemSpace, table: np.ndarray | None = None) -> tuple[sps.csr_matrix, np.ndarray]:
        """The observation Gram matrix and right-hand side on the free DOFs of a space.

        Gram: integral over q_T of rho0^{-2} phi_i phi_j. Right-hand side: integral over q_T of
        rho0^{-2} y_obs phi_i.
        """
        cells = self.obs_cells
        values = self.values(space) if table is None else table
        weight = self.rho0_inv[cells] ** 2
        return self.gram(space, values, weight, cells), self.load(space, values, weight * self.obs.values, cells)

    @cached_property
    def observation_norm(self) -> float:
        """||rho0^{-1} y_obs||_{L2(q_T)}."""
        cells = self.obs_cells
        weighted = self.rho0_inv[cells] * self.obs.values
        return math.sqrt(self.quadrature.integrate(weighted**2, cells))

    def _select(self, table: np.ndarray, cells: np.ndarray | None) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature weights and basis samples of a subset of cells."""
        if cells is None:
            return self.weights, table
        return self.weights[cells], table[cells] if table.ndim == 3 else table

    def gram(
        self, space: FemSpace, table: np.ndarray, weight: np.ndarray, cells: np.ndarray | None = None
    ) -> sps.csr_matrix:
        """Restricted symmetric matrix of sum weight * u_i * u_j.

        `weight` is given on the selected cells only, as in `assemble_bilinear`.
        """
        w, table = self._select(table, cells)
        return restrict_matrix(assemble_symmetric(space, table, w * weight, cells), space, space)

    def coupling(
        self,
        row_space: FemSpace,
        col_space: FemSpace,
        rows: np.ndarray,
        cols: np.ndarray,
        weight: np.ndarray,
        cells: np.ndarray | None = None,
    ) -> sps.csr_matrix:
        """Restricted matrix of sum weight * u_i * v_j."""
        w, rows = self._select(rows, cells)
        _, cols = self._select(cols, cells)
        matrix = assemble_bilinear(row_space, col_space, rows, cols, w * weight, cells)
        return restrict_matrix(matrix, row_space, col_space)

    def load(
        self, space: FemSpace, table: np.ndarray, weight: np.ndarray, cells: np.ndarray | None = None
    ) -> np.ndarray:
        """Restricted vector of sum weight * u_i."""
        w, table = self._select(table, cells)
        return space.restrict(assemble_linear(space, table, w * weight, cells))
