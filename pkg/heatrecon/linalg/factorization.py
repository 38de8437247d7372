"""Module for the factorizations of the saddle-point and SPD systems.

Solvers follow a small common interface: `update(A)` factorizes, `solve(b)` solves.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
from loguru import logger
from scipy.sparse.linalg import norm as sparse_norm
from scipy.sparse.linalg import splu

from heatrecon.errors import FactorizationFailure, SolverError

RESIDUAL_TOLERANCE = 1e-8


def ruiz_scaling(matrix: sps.spmatrix, sweeps: int = 8) -> np.ndarray:
    """Symmetric Ruiz equilibration.

    Returns:
        d such that diag(d) A diag(d) has rows of max-norm close to 1.
    """
    matrix = sps.csr_matrix(abs(matrix))
    d = np.ones(matrix.shape[0])
    for _ in range(sweeps):
        scaled = sps.diags(d) @ matrix @ sps.diags(d)
        row_max = scaled.max(axis=1).toarray().ravel()
        row_max[row_max == 0.0] = 1.0
        d /= np.sqrt(row_max)
    return d


class LinearSolver(ABC):
    """A factorization of a fixed matrix."""

    def __init__(self, A: sps.spmatrix | np.ndarray | None = None) -> None:
        self.A = None
        if A is not None:
            self.update(A)

    @abstractmethod
    def update(self, A: sps.spmatrix | np.ndarray) -> None:
        """Factorizes A."""

    @abstractmethod
    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Solves A x = rhs."""


class SolverDenseLDL(LinearSolver):
    """Dense symmetric indefinite factorization P A P^T = L D L^T with Bunch-Kaufman pivoting."""

    def update(self, A: sps.spmatrix | np.ndarray) -> None:
        self.A = A
        dense = A.toarray() if sps.issparse(A) else np.asarray(A, dtype=float)
        lu, d, perm = sla.ldl(dense, lower=True)
        self.L = lu[perm]
        self.perm = perm
        blocks = self.__blocks(d)
        eigenvalues = np.concatenate([np.linalg.eigvalsh(block) for block in blocks]) if blocks else np.zeros(0)
        self.pivots = eigenvalues
        self.inertia = (int(np.sum(eigenvalues > 0)), int(np.sum(eigenvalues < 0)), int(np.sum(eigenvalues == 0)))
        # tiny pivots are legitimate under the weights, only an exactly singular D is rejected
        if not np.all(np.isfinite(eigenvalues)):
            raise FactorizationFailure("LDL^T produced non-finite pivots")
        if self.inertia[2]:
            raise FactorizationFailure(f"LDL^T found {self.inertia[2]} zero pivot(s): the matrix is singular")
        self.d_inverse = sps.block_diag([np.linalg.inv(block) for block in blocks], format="csr")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        z = sla.solve_triangular(self.L, rhs[self.perm], lower=True, unit_diagonal=True)
        w = self.d_inverse @ z
        u = sla.solve_triangular(self.L.T, w, lower=False, unit_diagonal=True)
        x = np.empty_like(u)
        x[self.perm] = u
        return x

    @staticmethod
    def __blocks(d: np.ndarray) -> list[np.ndarray]:
        """The 1x1 and 2x2 diagonal blocks of D."""

        blocks = []
        i, n = 0, d.shape[0]
        while i < n:
            size = 2 if i + 1 < n and d[i + 1, i] != 0.0 else 1
            blocks.append(d[i : i + size, i : i + size])
            i += size
        return blocks


class SolverSparseLU(LinearSolver):
    """Sparse LU with SuperLU, for systems above the dense limit."""

    def update(self, A: sps.spmatrix | np.ndarray) -> None:
        self.A = A
        try:
            self.factor = splu(sps.csc_matrix(A))
        except RuntimeError as e:
            raise FactorizationFailure(f"sparse LU failed: {e}") from e
        pivots = self.factor.U.diagonal()
        if not np.all(np.isfinite(pivots)) or np.any(pivots == 0.0):
            raise FactorizationFailure("sparse LU found a zero or non-finite pivot: the matrix is singular")
        self.inertia = None

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return self.factor.solve(rhs)


class SolverCholesky(LinearSolver):
    """Cholesky factorization of an SPD matrix, dense up to `dense_limit` and sparse LU above.

    When the dense factorization breaks down, a diagonal shift of growing size is tried before giving up.

    Attributes:
        shift: the diagonal shift that was needed, 0 if none.
    """

    def __init__(
        self,
        A: sps.spmatrix | np.ndarray | None = None,
        dense_limit: int = 1500,
        error: type[SolverError] = FactorizationFailure,
    ) -> None:
        self.dense_limit = dense_limit
        self.error = error
        self.shift = 0.0
        super().__init__(A)

    def update(self, A: sps.spmatrix | np.ndarray) -> None:
        self.A = A
        n = A.shape[0]
        if n > self.dense_limit:
            try:
                self.sparse = splu(sps.csc_matrix(A))
            except RuntimeError as e:
                raise self.error(f"sparse factorization of the SPD block failed: {e}") from e
            self.dense = None
            return

        dense = A.toarray() if sps.issparse(A) else np.asarray(A, dtype=float)
        scale = float(np.max(np.abs(np.diag(dense)), initial=0.0))
        for shift in (0.0, 1e-14, 1e-12, 1e-10):
            try:
                self.dense = sla.cho_factor(dense + shift * scale * np.eye(n), lower=True)
                self.shift = shift * scale
                if shift:
                    logger.warning(f"Cholesky needed a diagonal shift of {self.shift:.3e}")
                return
            except np.linalg.LinAlgError:
                continue
        raise self.error("the SPD block is not positive definite, even after diagonal shifts")

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        if self.dense is not None:
            return sla.cho_solve(self.dense, rhs)
        return self.sparse.solve(rhs)


def factorize(A: sps.spmatrix, dense_limit: int) -> LinearSolver:
    """Picks the dense LDL^T solver up to `dense_limit` unknowns and sparse LU above."""

    if A.shape[0] <= dense_limit:
        return SolverDenseLDL(A)
    return SolverSparseLU(A)


def check_residual(
    A: sps.spmatrix | np.ndarray,
    x: np.ndarray,
    b: np.ndarray,
    tolerance: float = RESIDUAL_TOLERANCE,
    scaling: np.ndarray | None = None,
) -> float:
    """Normwise backward error of x on the equilibrated system.

    With D = diag(d) from `ruiz_scaling`, the check is run on (D A D) (x / d) = d b:
    ||D A D x~ - b~|| / (||D A D|| ||x~|| + ||b~||).

    Args:
        scaling: the equilibration d, computed from A when not given.

    Raises:
        FactorizationFailure: if it exceeds `tolerance` or is not finite.
    """
    if not np.all(np.isfinite(x)):
        raise FactorizationFailure("solution contains non-finite values")
    A = sps.csr_matrix(A)
    d = ruiz_scaling(A) if scaling is None else scaling
    scaled = sps.diags(d) @ A @ sps.diags(d)
    x_scaled, b_scaled = x / d, d * b
    denominator = sparse_norm(scaled, np.inf) * np.linalg.norm(x_scaled, np.inf) + np.linalg.norm(b_scaled, np.inf)
    residual = np.linalg.norm(scaled @ x_scaled - b_scaled, np.inf) / denominator if denominator > 0 else 0.0
    if not residual <= tolerance:
        raise FactorizationFailure(f"relative residual {residual:.3e} above {tolerance:.1e}")
    return float(residual)
