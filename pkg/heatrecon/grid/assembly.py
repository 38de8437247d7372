"""Module for vectorized cell-by-cell assembly of bilinear and linear forms."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sps

from heatrecon.grid.spaces import FemSpace


def _per_cell(table: np.ndarray, n_cells: int) -> np.ndarray:
    """Broadcasts a (nq, n_local) reference table to (n_cells, nq, n_local)."""

    if table.ndim == 2:
        return np.broadcast_to(table, (n_cells,) + table.shape)
    return table


def assemble_bilinear(
    row_space: FemSpace,
    col_space: FemSpace,
    row_values: np.ndarray,
    col_values: np.ndarray,
    weight: np.ndarray,
    cells: np.ndarray | None = None,
) -> sps.csr_matrix:
    """Assembles the matrix of sum_q weight * u_i * v_j over a set of cells.

    Args:
        row_space: space of the test functions (rows).
        col_space: space of the trial functions (columns).
        row_values: test-function samples, (n_cells, nq, n_row_local) or a shared (nq, n_row_local) table.
        col_values: trial-function samples, same conventions.
        weight: quadrature weight times coefficient, (n_cells, nq).
        cells: restrict the sum to these cells; `row_values`, `col_values` and `weight` are then
            given for those cells only.

    Returns:
        The full (unconstrained) matrix, n_row_dofs x n_col_dofs.
    """
    n = weight.shape[0]
    rows = _per_cell(row_values, n)
    cols = _per_cell(col_values, n)
    local = np.einsum("cq,cqi,cqj->cij", weight, rows, cols)

    row_dofs = row_space.cell_dofs if cells is None else row_space.cell_dofs[cells]
    col_dofs = col_space.cell_dofs if cells is None else col_space.cell_dofs[cells]
    i = np.broadcast_to(row_dofs[:, :, None], local.shape)
    j = np.broadcast_to(col_dofs[:, None, :], local.shape)
    shape = (row_space.n_dofs, col_space.n_dofs)
    return sps.coo_matrix((local.ravel(), (i.ravel(), j.ravel())), shape=shape).tocsr()


def assemble_symmetric(
    space: FemSpace, values: np.ndarray, weight: np.ndarray, cells: np.ndarray | None = None
) -> sps.csr_matrix:
    """Assembles sum_q weight * u_i * u_j and mirrors the upper triangle so the result is exactly symmetric."""

    matrix = assemble_bilinear(space, space, values, values, weight, cells)
    return mirror(matrix)


def mirror(matrix: sps.spmatrix) -> sps.csr_matrix:
    """Copies the upper triangle of a square matrix onto its lower triangle."""

    upper = sps.triu(matrix, format="csr")
    return (upper + sps.triu(matrix, k=1, format="csr").T).tocsr()


def assemble_linear(
    space: FemSpace, values: np.ndarray, weight: np.ndarray, cells: np.ndarray | None = None
) -> np.ndarray:
    """Assembles the vector of sum_q weight * u_i over a set of cells.

    Args:
        space: space of the test functions.
        values: test-function samples, (n_cells, nq, n_local) or a shared (nq, n_local) table.
        weight: quadrature weight times data, (n_cells, nq).
        cells: restrict the sum to these cells, as in `assemble_bilinear`.
    """
    n = weight.shape[0]
    local = np.einsum("cq,cqi->ci", weight, _per_cell(values, n))
    dofs = space.cell_dofs if cells is None else space.cell_dofs[cells]
    return np.bincount(dofs.ravel(), weights=local.ravel(), minlength=space.n_dofs)


def restrict_matrix(matrix: sps.spmatrix, row_space: FemSpace, col_space: FemSpace) -> sps.csr_matrix:
    """Keeps the rows and columns of the unconstrained DOFs."""

    return sps.csr_matrix(matrix)[row_space.free][:, col_space.free]
