"""Module for the finite-element spaces on the space-time grid.

Three families are available:

- `HERMITE_C1_TENSOR`: tensor products of cubic Hermite polynomials, four degrees of freedom per
  node (value, d/dx, d/dt, d2/dxdt). Fields are C1 in x and t and have a square-integrable d2/dx2.
- `BILINEAR_Q1`: continuous bilinear elements, one value per node.
- `PIECEWISE_CONSTANT_P0`: one value per cell.

Degrees of freedom of the Hermite family are scaled so that a unit derivative DOF produces a unit
physical derivative at its node.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass

import numpy as np

from heatrecon.enums.spaces import BasisKind, Derivative
from heatrecon.errors import UnsupportedDerivative
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import QuadratureSet

# corners of the reference cell in local order: (a, b) with a the x side and b the t side
CORNERS = ((0, 0), (1, 0), (0, 1), (1, 1))

# Hermite node DOFs
VALUE, SLOPE_X, SLOPE_T, SLOPE_XT = range(4)

SUPPORTED_DERIVATIVES = {
    BasisKind.HERMITE_C1_TENSOR: {Derivative.VALUE, Derivative.DX, Derivative.DT, Derivative.DXX},
    BasisKind.BILINEAR_Q1: {Derivative.VALUE, Derivative.DX, Derivative.DT},
    BasisKind.PIECEWISE_CONSTANT_P0: {Derivative.VALUE},
}


@dataclass(frozen=True, eq=False)
class FemSpace:
    """A finite-element space on a grid.

    Attributes:
        kind: the element family.
        grid: the grid the space lives on.
        n_dofs: global number of degrees of freedom.
        cell_dofs: global DOF indices of each cell, shape (n_cells, n_local).
        constrained: mask of the DOFs fixed to zero (lateral boundary, and terminal time if asked).
        terminal: whether the DOFs controlling the trace at t = T are constrained.
    """

    kind: BasisKind
    grid: SpaceTimeGrid
    n_dofs: int
    cell_dofs: np.ndarray
    constrained: np.ndarray
    terminal: bool = False

    @property
    def n_local(self) -> int:
        """DOFs per cell."""
        return self.cell_dofs.shape[1]

    @property
    def free(self) -> np.ndarray:
        """Indices of the unconstrained DOFs."""
        return np.flatnonzero(~self.constrained)

    @property
    def n_free(self) -> int:
        """Number of unconstrained DOFs."""
        return int(np.count_nonzero(~self.constrained))

    def restrict(self, values: np.ndarray) -> np.ndarray:
        """Keeps the unconstrained entries of a full DOF vector."""
        return np.asarray(values)[self.free]

    def extend(self, free_values: np.ndarray) -> np.ndarray:
        """Builds a full DOF vector from its unconstrained entries, zero elsewhere."""

        full = np.zeros(self.n_dofs)
        full[self.free] = free_values
        return full

    def supports(self, derivative: Derivative) -> bool:
        """Whether the family can tabulate a derivative."""
        return derivative in SUPPORTED_DERIVATIVES[self.kind]


@dataclass(frozen=True)
class BasisEval:
    """Local basis functions of one cell evaluated at one or more points.

    Each table has shape (n_points, n_local); derivatives that were not requested are None.
    """

    dofs: np.ndarray
    value: np.ndarray | None = None
    dx: np.ndarray | None = None
    dt: np.ndarray | None = None
    dxx: np.ndarray | None = None

    def __getitem__(self, derivative: Derivative) -> np.ndarray | None:
        return getattr(self, derivative.value)


def make_space(kind: BasisKind, grid: SpaceTimeGrid, dirichlet: bool = True, terminal: bool = False) -> FemSpace:
    """Creates a finite-element space on a grid.

    Args:
        kind: the element family.
        grid: the grid.
        dirichlet: constrain the DOFs controlling the trace on the lateral boundary.
        terminal: also constrain the DOFs controlling the trace at t = T.
    """
    if kind is BasisKind.PIECEWISE_CONSTANT_P0:
        cell_dofs = np.arange(grid.n_cells)[:, None]
        return FemSpace(kind, grid, grid.n_cells, cell_dofs, np.zeros(grid.n_cells, dtype=bool))

    i, j = grid.cell_indices
    row = grid.nx + 1
    corner_nodes = np.column_stack([(j + b) * row + (i + a) for a, b in CORNERS])
    node_i = np.tile(np.arange(row), grid.nt + 1)
    node_j = np.repeat(np.arange(grid.nt + 1), row)
    lateral = (node_i == 0) | (node_i == grid.nx)
    top = node_j == grid.nt

    if kind is BasisKind.BILINEAR_Q1:
        constrained = np.zeros(grid.n_nodes, dtype=bool)
        if dirichlet:
            constrained |= lateral
        if terminal:
            constrained |= top
        return FemSpace(kind, grid, grid.n_nodes, corner_nodes, constrained, terminal)

    cell_dofs = (4 * corner_nodes[:, :, None] + np.arange(4)[None, None, :]).reshape(grid.n_cells, 16)
    constrained = np.zeros((grid.n_nodes, 4), dtype=bool)
    if dirichlet:
        # the trace on x = const is spanned by the value and d/dt DOFs
        constrained[lateral, VALUE] = True
        constrained[lateral, SLOPE_T] = True
    if terminal:
        # the trace on t = T is spanned by the value and d/dx DOFs
        constrained[top, VALUE] = True
        constrained[top, SLOPE_X] = True
    return FemSpace(kind, grid, 4 * grid.n_nodes, cell_dofs, constrained.ravel(), terminal)


def _hermite_1d(s: np.ndarray, h: float, order: int) -> np.ndarray:
    """Cubic Hermite shape functions on [0, 1] with slope functions scaled by the cell size.

    Columns: left value, left slope, right value, right slope. `order` is the derivative order in the
    physical variable.
    """
    if order == 0:
        columns = [1 - 3 * s**2 + 2 * s**3, h * (s - 2 * s**2 + s**3), 3 * s**2 - 2 * s**3, h * (s**3 - s**2)]
    elif order == 1:
        columns = [(-6 * s + 6 * s**2) / h, 1 - 4 * s + 3 * s**2, (6 * s - 6 * s**2) / h, 3 * s**2 - 2 * s]
    elif order == 2:
        columns = [(-6 + 12 * s) / h**2, (-4 + 6 * s) / h, (6 - 12 * s) / h**2, (6 * s - 2) / h]
    else:
        raise ValueError(f"unsupported Hermite derivative order {order}")
    return np.column_stack([np.broadcast_to(c, s.shape) for c in columns])


def _linear_1d(s: np.ndarray, h: float, order: int) -> np.ndarray:
    """Linear shape functions on [0, 1]: left and right."""

    if order == 0:
        return np.column_stack([1 - s, s])
    ones = np.ones_like(s)
    return np.column_stack([-ones / h, ones / h])


_ORDERS = {
    Derivative.VALUE: (0, 0),
    Derivative.DX: (1, 0),
    Derivative.DT: (0, 1),
    Derivative.DXX: (2, 0),
}


def tabulate(
    kind: BasisKind, xi: np.ndarray, tau: np.ndarray, hx: float, ht: float, derivatives: Iterable[Derivative]
) -> dict[Derivative, np.ndarray]:
    """Evaluates the local basis at points of the reference cell.

    Args:
        kind: the element family.
        xi: local x coordinates in [0, 1].
        tau: local t coordinates in [0, 1].
        hx: cell width.
        ht: cell height.
        derivatives: which physical partial derivatives to return.

    Returns:
        One (n_points, n_local) table per requested derivative.

    Raises:
        UnsupportedDerivative: if the family cannot provide a requested derivative.
    """
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    tables = {}
    for derivative in derivatives:
        if derivative not in SUPPORTED_DERIVATIVES[kind]:
            raise UnsupportedDerivative(f"{kind.name} space cannot provide {derivative.value}")
        ox, ot = _ORDERS[derivative]
        if kind is BasisKind.PIECEWISE_CONSTANT_P0:
            tables[derivative] = np.ones((xi.size, 1))
        elif kind is BasisKind.BILINEAR_Q1:
            bx, bt = _linear_1d(xi, hx, ox), _linear_1d(tau, ht, ot)
            tables[derivative] = np.column_stack([bx[:, a] * bt[:, b] for a, b in CORNERS])
        else:
            bx, bt = _hermite_1d(xi, hx, ox), _hermite_1d(tau, ht, ot)
            tables[derivative] = np.column_stack(
                [bx[:, 2 * a + px] * bt[:, 2 * b + pt] for a, b in CORNERS for pt in (0, 1) for px in (0, 1)]
            )
    return tables


def eval_basis(
    space: FemSpace,
    cell: int,
    local_point: tuple[float, float] | np.ndarray,
    derivatives: Iterable[Derivative] = (Derivative.VALUE,),
) -> BasisEval:
    """Evaluates the basis functions of one cell at a point of the reference cell.

    Args:
        space: the finite-element space.
        cell: flat cell index.
        local_point: (xi, tau) in [0, 1]^2, or an array of such points.
        derivatives: partial derivatives to evaluate.

    Raises:
        UnsupportedDerivative: for d2/dx2 on Q1 or P0, or any derivative on P0.
    """
    point = np.atleast_2d(np.asarray(local_point, dtype=float))
    if np.any(point < 0.0) or np.any(point > 1.0):
        raise ValueError(f"local point outside the reference cell: {local_point}")
    tables = tabulate(space.kind, point[:, 0], point[:, 1], space.grid.hx, space.grid.ht, derivatives)
    return BasisEval(dofs=space.cell_dofs[cell], **{d.value: table for d, table in tables.items()})


def quadrature_tables(
    space: FemSpace, quadrature: QuadratureSet, derivatives: Iterable[Derivative]
) -> dict[Derivative, np.ndarray]:
    """Basis tables at the quadrature points, shared by every cell of the uniform grid."""

    grid = space.grid
    return tabulate(space.kind, quadrature.ref_x, quadrature.ref_t, grid.hx, grid.ht, derivatives)


def at_quadrature(
    space: FemSpace, values: np.ndarray, quadrature: QuadratureSet, derivative: Derivative = Derivative.VALUE
) -> np.ndarray:
    """Samples a field or one of its derivatives at every quadrature point, shape (n_cells, nq)."""

    table = quadrature_tables(space, quadrature, (derivative,))[derivative]
    return np.asarray(values)[space.cell_dofs] @ table.T


def evaluate(
    space: FemSpace, values: np.ndarray, x: np.ndarray, t: np.ndarray, derivative: Derivative = Derivative.VALUE
) -> np.ndarray:
    """Evaluates a field or one of its derivatives at arbitrary points of Q_T."""

    x = np.asarray(x, dtype=float)
    shape = x.shape
    cells, xi, tau = space.grid.locate(x.ravel(), np.asarray(t, dtype=float).ravel())
    table = tabulate(space.kind, xi, tau, space.grid.hx, space.grid.ht, (derivative,))[derivative]
    local = np.asarray(values)[space.cell_dofs[cells]]
    return np.sum(local * table, axis=1).reshape(shape)


def interpolate(
    space: FemSpace,
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    dx: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
    dt: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
    dxdt: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
) -> np.ndarray:
    """Interpolates a function into a space; constrained DOFs are set to zero.

    Q1 uses nodal values, P0 the value at cell centres, Hermite the nodal value and the three
    derivatives, which must then be supplied.

    Returns:
        The full DOF vector.
    """
    grid = space.grid
    if space.kind is BasisKind.PIECEWISE_CONSTANT_P0:
        corners = grid.cells
        values = fn(0.5 * (corners[:, 0] + corners[:, 1]), 0.5 * (corners[:, 2] + corners[:, 3]))
        return np.asarray(values, dtype=float) * np.ones(grid.n_cells)

    xn, tn = grid.node_coordinates
    if space.kind is BasisKind.BILINEAR_Q1:
        values = np.asarray(fn(xn, tn), dtype=float) * np.ones(grid.n_nodes)
    else:
        if dx is None or dt is None or dxdt is None:
            raise ValueError("Hermite interpolation needs the d/dx, d/dt and d2/dxdt callables")
        values = np.column_stack(
            [np.asarray(g(xn, tn), dtype=float) * np.ones(grid.n_nodes) for g in (fn, dx, dt, dxdt)]
        ).ravel()
    values[space.constrained] = 0.0
    return values
