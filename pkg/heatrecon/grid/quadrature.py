"""Module for tensor Gauss-Legendre quadrature on the space-time grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from heatrecon.constants import SUPPORTED_ORDERS
from heatrecon.errors import UnsupportedOrder
from heatrecon.grid.mesh import SpaceTimeGrid


@dataclass(frozen=True, eq=False)
class QuadratureSet:
    """Per-cell Gauss points of a grid.

    Point q of a cell has local coordinates (ref_x[q], ref_t[q]) in the unit square; x varies
    fastest. All arrays are read-only.

    Attributes:
        grid: the grid the points belong to.
        order: number of Gauss points per axis.
        ref_x: local x coordinates, shape (nq,).
        ref_t: local t coordinates, shape (nq,).
        ref_w: weights on the unit square, shape (nq,).
        x: global x coordinates, shape (n_cells, nq).
        t: global t coordinates, shape (n_cells, nq).
        w: global weights, shape (n_cells, nq).
    """

    grid: SpaceTimeGrid
    order: int
    ref_x: np.ndarray
    ref_t: np.ndarray
    ref_w: np.ndarray
    x: np.ndarray
    t: np.ndarray
    w: np.ndarray

    @property
    def n_points(self) -> int:
        """Points per cell."""
        return self.ref_w.size

    def integrate(self, values: np.ndarray, cells: np.ndarray | None = None) -> float:
        """Integrates point samples over the grid, or over a subset of cells.

        Args:
            values: samples of shape (n_cells, nq), or (len(cells), nq) when `cells` is given.
            cells: optional flat cell indices.
        """
        weights = self.w if cells is None else self.w[cells]
        return float(np.sum(weights * values))


def gauss_legendre_unit(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre points and weights on [0, 1]."""

    if order not in SUPPORTED_ORDERS:
        raise UnsupportedOrder(f"quadrature order must be one of {SUPPORTED_ORDERS}, got {order}")
    points, weights = leggauss(order)
    return 0.5 * (points + 1.0), 0.5 * weights


def quadrature_points(grid: SpaceTimeGrid, order: int) -> QuadratureSet:
    """Builds the tensor Gauss-Legendre rule of every cell.

    The rule is exact for polynomials of degree <= 2 * order - 1 in each variable. Every point is
    strictly inside its cell, so t > 0 everywhere.

    Args:
        grid: the space-time grid.
        order: points per axis, one of 2, 3, 4.

    Raises:
        UnsupportedOrder: for any other order.
    """
    points, weights = gauss_legendre_unit(order)
    ref_x = np.tile(points, order)
    ref_t = np.repeat(points, order)
    ref_w = np.tile(weights, order) * np.repeat(weights, order)

    corners = grid.cells
    x = corners[:, [0]] + grid.hx * ref_x[None, :]
    t = corners[:, [2]] + grid.ht * ref_t[None, :]
    w = np.broadcast_to(grid.cell_area * ref_w, x.shape).copy()

    for array in (ref_x, ref_t, ref_w, x, t, w):
        array.setflags(write=False)
    return QuadratureSet(grid, order, ref_x, ref_t, ref_w, x, t, w)
