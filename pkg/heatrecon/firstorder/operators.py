"""Module for the first-order operators on pairs of bilinear fields.

With the flux p = c y_x - F, the equation becomes

    I(y, p) = y_t - p_x + d y = f,    J(y, p) = c y_x - p = F,

and the multiplier pair (phi, sigma) is tested against I*(phi, sigma) = -phi_t - sigma_x + d phi.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps

from heatrecon.constants import DEFAULT_ORDER
from heatrecon.enums.spaces import BasisKind, Derivative
from heatrecon.errors import UnsupportedSpace
from heatrecon.forward.coefficients import Coefficients, sample_coefficients
from heatrecon.forward.field import Field
from heatrecon.grid.assembly import mirror
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import QuadratureSet, quadrature_points
from heatrecon.grid.spaces import FemSpace, make_space
from heatrecon.secondorder.forms import FormContext

Pair = tuple[FemSpace, FemSpace]
PairTables = tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True, eq=False)
class PairField:
    """A state and its flux, both bilinear.

    Attributes:
        y: the state, usually with the lateral Dirichlet condition.
        p: the scalar flux, free on the boundary.
    """

    y: Field
    p: Field

    def __post_init__(self) -> None:
        for name, field in (("y", self.y), ("p", self.p)):
            if field.space.kind is not BasisKind.BILINEAR_Q1:
                raise UnsupportedSpace(f"{name} must be bilinear, got {field.space.kind.name}")
        if not self.y.space.grid.same_layout(self.p.space.grid):
            raise UnsupportedSpace("y and p live on different grids")

    @property
    def spaces(self) -> Pair:
        return self.y.space, self.p.space

    @property
    def free_values(self) -> np.ndarray:
        return np.concatenate([self.y.free_values, self.p.free_values])

    @classmethod
    def from_free(cls, spaces: Pair, values: np.ndarray) -> PairField:
        n = spaces[0].n_free
        return cls(Field.from_free(spaces[0], values[:n]), Field.from_free(spaces[1], values[n:]))


def pair_spaces(grid: SpaceTimeGrid) -> Pair:
    """Primal spaces of the first-order formulations: y with the Dirichlet condition, p free."""
    y = make_space(BasisKind.BILINEAR_Q1, grid, dirichlet=True)
    return y, make_space(BasisKind.BILINEAR_Q1, grid, dirichlet=False)


def multiplier_pair_spaces(grid: SpaceTimeGrid) -> Pair:
    """Spaces of (phi, sigma): phi vanishes on the lateral boundary and at t = T, sigma is free."""
    phi = make_space(BasisKind.BILINEAR_Q1, grid, dirichlet=True, terminal=True)
    return phi, make_space(BasisKind.BILINEAR_Q1, grid, dirichlet=False)


def _check(spaces: Pair) -> None:
    for space in spaces:
        if not (space.supports(Derivative.DX) and space.supports(Derivative.DT)):
            raise UnsupportedSpace(f"{space.kind.name} space has no first derivatives")


def equation_tables(context: FormContext, spaces: Pair, adjoint: bool = False) -> PairTables:
    """Samples of I (or I*) applied to (u_i, 0) and to (0, v_i).

    Raises:
        UnsupportedSpace: if a space has no first derivatives.
    """
    _check(spaces)
    first = context.tables(spaces[0], Derivative.VALUE, Derivative.DT)
    second = context.tables(spaces[1], Derivative.DX)
    sign = -1.0 if adjoint else 1.0
    d = context.samples.d
    return sign * first[Derivative.DT][None] + d[..., None] * first[Derivative.VALUE][None], -second[Derivative.DX]


def flux_tables(context: FormContext, spaces: Pair) -> PairTables:
    """Samples of J applied to (u_i, 0) and to (0, v_i)."""

    _check(spaces)
    first = context.tables(spaces[0], Derivative.DX)
    second = context.tables(spaces[1], Derivative.VALUE)
    return context.samples.c[..., None] * first[Derivative.DX][None], -second[Derivative.VALUE]


def pair_gram(context: FormContext, spaces: Pair, tables: PairTables, weight: np.ndarray) -> sps.csr_matrix:
    """Exactly symmetric matrix of the integral of weight * G(u) G(u') over the pair space."""

    blocks = [
        [context.coupling(spaces[a], spaces[b], tables[a], tables[b], weight) for b in range(2)] for a in range(2)
    ]
    return mirror(sps.bmat(blocks, format="csr"))


def pair_coupling(
    context: FormContext,
    row_space: FemSpace,
    rows: np.ndarray,
    spaces: Pair,
    tables: PairTables,
    weight: np.ndarray,
    cells: np.ndarray | None = None,
) -> sps.csr_matrix:
    """Matrix of the integral of weight * v_k G(u_j), rows on `row_space` and columns on the pair."""

    blocks = [context.coupling(row_space, space, rows, table, weight, cells) for space, table in zip(spaces, tables)]
    return sps.hstack(blocks, format="csr")


def cell_jump_gram(grid: SpaceTimeGrid) -> sps.csr_matrix:
    """Matrix of the sum over interior edges E of h_E |E| (u_K - u_K')^2 for piecewise constants.

    h_E is the cell size across E, so every edge carries the cell area.
    """

    def differences(n: int) -> sps.csr_matrix:
        return sps.diags([-np.ones(n - 1), np.ones(n - 1)], [0, 1], shape=(n - 1, n), format="csr")

    across_x = sps.kron(sps.identity(grid.nt), differences(grid.nx), format="csr")
    across_t = sps.kron(differences(grid.nt), sps.identity(grid.nx), format="csr")
    return mirror(grid.cell_area * (across_x.T @ across_x + across_t.T @ across_t))


def pair_load(
    context: FormContext, spaces: Pair, tables: PairTables, weight: np.ndarray, cells: np.ndarray | None = None
) -> np.ndarray:
    return np.concatenate([context.load(space, table, weight, cells) for space, table in zip(spaces, tables)])


def apply_IJ(
    pair: PairField, coeffs: Coefficients, quadrature: QuadratureSet | None = None, adjoint: bool = False
) -> tuple[np.ndarray, np.ndarray]:
    """I(y, p) (or I*(y, p)) and J(y, p) at every quadrature point, each of shape (n_cells, nq).

    Args:
        pair: the pair.
        coeffs: coefficients of the operators.
        quadrature: the points, by default the quadrature of default order on the grid of the pair.
        adjoint: return I* instead of I.
    """
    if quadrature is None:
        quadrature = quadrature_points(pair.y.space.grid, DEFAULT_ORDER)
    s = sample_coefficients(coeffs, quadrature)
    y, p = pair.y, pair.p
    sign = -1.0 if adjoint else 1.0
    y_value = y.at_quadrature(quadrature)
    equation = sign * y.at_quadrature(quadrature, Derivative.DT) - p.at_quadrature(quadrature, Derivative.DX)
    flux = s.c * y.at_quadrature(quadrature, Derivative.DX) - p.at_quadrature(quadrature)
    return equation + s.d * y_value, flux
