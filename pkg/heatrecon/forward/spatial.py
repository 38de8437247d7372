"""Module for the P1 (in space) matrices used by the time-stepping solvers."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sps

from heatrecon.forward.coefficients import Coefficients, SpaceTimeFunction
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import gauss_legendre_unit


@dataclass(frozen=True, eq=False)
class SpatialDiscretization:
    """Continuous P1 elements on the spatial cells of a grid, with the lateral nodes removed.

    Interior node i (0-based) is grid node i + 1.
    """

    grid: SpaceTimeGrid
    coeffs: Coefficients
    order: int = 3

    @cached_property
    def points(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Local abscissae (nq,), global abscissae (nx, nq) and weights (nx, nq)."""

        s, w = gauss_legendre_unit(self.order)
        x = self.grid.x_nodes[:-1, None] + self.grid.hx * s[None, :]
        return s, x, np.broadcast_to(self.grid.hx * w, x.shape)

    @property
    def n_interior(self) -> int:
        return self.grid.nx - 1

    @cached_property
    def values(self) -> np.ndarray:
        """Left and right hat functions at the local abscissae, (nq, 2)."""
        s = self.points[0]
        return np.column_stack([1.0 - s, s])

    @cached_property
    def slopes(self) -> np.ndarray:
        h = self.grid.hx
        return np.tile([-1.0 / h, 1.0 / h], (self.points[0].size, 1))

    def _matrix(self, weight: np.ndarray, left: np.ndarray, right: np.ndarray) -> sps.csr_matrix:
        local = np.einsum("eq,qa,qb->eab", weight, left, right)
        nodes = np.arange(self.grid.nx)[:, None] + np.arange(2)[None, :]
        i = np.broadcast_to(nodes[:, :, None], local.shape)
        j = np.broadcast_to(nodes[:, None, :], local.shape)
        n = self.grid.nx + 1
        full = sps.coo_matrix((local.ravel(), (i.ravel(), j.ravel())), shape=(n, n)).tocsr()
        return full[1:-1, 1:-1]

    def _vector(self, weight: np.ndarray) -> np.ndarray:
        local = np.einsum("eq,qa->ea", weight, self.values)
        nodes = np.arange(self.grid.nx)[:, None] + np.arange(2)[None, :]
        return np.bincount(nodes.ravel(), weights=local.ravel(), minlength=self.grid.nx + 1)[1:-1]

    @cached_property
    def mass(self) -> sps.csr_matrix:
        return self._matrix(self.points[2], self.values, self.values)

    @cached_property
    def lumped_mass(self) -> np.ndarray:
        return np.asarray(self.mass.sum(axis=1)).ravel()

    @cached_property
    def stiffness(self) -> sps.csr_matrix:
        """Matrix of the integral of c w_i' w_j'."""
        _, x, w = self.points
        return self._matrix(w * self.coeffs.c(x), self.slopes, self.slopes)

    @cached_property
    def laplacian(self) -> sps.csr_matrix:
        """Stiffness matrix with c = 1, the Riesz map of H^1_0."""
        return self._matrix(self.points[2], self.slopes, self.slopes)

    def reaction(self, t: float) -> sps.csr_matrix:
        """Matrix of the integral of d(., t) w_i w_j."""
        _, x, w = self.points
        return self._matrix(w * self.coeffs.d(x, np.full_like(x, t)), self.values, self.values)

    def load(self, fn: SpaceTimeFunction, t: float) -> np.ndarray:
        """Vector of the integral of fn(., t) w_i."""
        _, x, w = self.points
        return self._vector(w * fn(x, np.full_like(x, t)))

    @cached_property
    def divergence(self) -> sps.csr_matrix:
        """E[i, e] = integral over cell e of w_i'; shape (n_interior, nx)."""
        n = self.grid.nx
        rows = np.concatenate([np.arange(n), np.arange(n) + 1])
        cols = np.concatenate([np.arange(n), np.arange(n)])
        data = np.concatenate([-np.ones(n), np.ones(n)])
        full = sps.coo_matrix((data, (rows, cols)), shape=(n + 1, n)).tocsr()
        return full[1:-1]

    @cached_property
    def flux_mass(self) -> np.ndarray:
        """Diagonal of B_m: the integral of 1/c over each cell."""
        _, x, w = self.points
        return np.sum(w / self.coeffs.c(x), axis=1)

    def flux_load(self, t: float) -> np.ndarray:
        """Integral of F(., t) / c over each cell."""
        _, x, w = self.points
        return np.sum(w * self.coeffs.F(x, np.full_like(x, t)) / self.coeffs.c(x), axis=1)

    def norm(self, fn, t: float | None = None) -> float:
        """L2(Omega) norm of a spatial function, or of a space-time function at time t."""
        _, x, w = self.points
        values = fn(x) if t is None else fn(x, np.full_like(x, t))
        return float(np.sqrt(np.sum(w * np.asarray(values) ** 2)))
