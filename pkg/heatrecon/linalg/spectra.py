"""Module for eigenvalue and condition estimates."""

from __future__ import annotations

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sps
from loguru import logger
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, aslinearoperator, cg, eigsh

from heatrecon.errors import NonConvergedEigen

Operator = sps.spmatrix | np.ndarray | LinearOperator


def to_dense(operator: Operator) -> np.ndarray:
    """Materializes an operator by applying it to the identity."""

    if isinstance(operator, np.ndarray):
        return operator
    if sps.issparse(operator):
        return operator.toarray()
    return operator @ np.eye(operator.shape[1])


def _start(n: int) -> np.ndarray:
    """Fixed Lanczos starting vector, so that repeated runs agree bit for bit."""
    return np.cos(np.arange(1, n + 1, dtype=float))


def condition_estimate(A: sps.spmatrix | np.ndarray, dense_limit: int = 1500) -> float:
    """2-norm condition number of a symmetric matrix, exact when dense and by Lanczos otherwise."""

    n = A.shape[0]
    if n <= dense_limit:
        eigenvalues = np.abs(np.linalg.eigvalsh(to_dense(A)))
        smallest = eigenvalues.min(initial=np.inf)
        return float(eigenvalues.max(initial=0.0) / smallest) if smallest > 0 else np.inf
    try:
        v0 = _start(n)
        largest = abs(eigsh(A, k=1, which="LM", v0=v0, return_eigenvectors=False)[0])
        smallest = abs(eigsh(sps.csc_matrix(A), k=1, sigma=0.0, which="LM", v0=v0, return_eigenvectors=False)[0])
    except (ArpackNoConvergence, RuntimeError) as e:
        raise NonConvergedEigen(f"condition estimate did not converge: {e}") from e
    return float(largest / smallest) if smallest > 0 else np.inf


def extreme_eigenvalues(
    operator: Operator, M: sps.spmatrix | np.ndarray | None = None, tol: float = 1e-10, maxiter: int | None = None
) -> tuple[float, float]:
    """Smallest and largest eigenvalues of a symmetric operator, or of the pencil (operator, M), by Lanczos.

    Small operators (at most 20 unknowns) are materialized and solved densely.

    Raises:
        NonConvergedEigen: if the Lanczos iteration does not converge.
    """
    n = operator.shape[0]
    if n <= 20:
        dense = to_dense(operator)
        eigenvalues = np.linalg.eigvalsh(dense) if M is None else sla.eigh(dense, to_dense(M), eigvals_only=True)
        return float(eigenvalues[0]), float(eigenvalues[-1])
    linear = aslinearoperator(operator)
    mass = None if M is None else sps.csc_matrix(M)
    options = {"k": 1, "M": mass, "tol": tol, "maxiter": maxiter, "v0": _start(n), "return_eigenvectors": False}
    try:
        low = eigsh(linear, which="SA", **options)[0]
        high = eigsh(linear, which="LA", **options)[0]
    except ArpackNoConvergence as e:
        raise NonConvergedEigen(f"Lanczos did not converge: {e}") from e
    return float(low), float(high)


def min_generalized_eigenvalue(
    A: Operator, M: sps.spmatrix | np.ndarray, dense_limit: int = 500, tol: float = 1e-10, maxit: int = 200
) -> float:
    """Smallest eigenvalue of the symmetric pencil A v = lambda M v, with M SPD.

    Dense up to `dense_limit` unknowns; inverse iteration with conjugate-gradient inner solves above.

    Raises:
        NonConvergedEigen: if inverse iteration does not reach `tol` within `maxit` steps.
    """
    n = A.shape[0]
    if n <= dense_limit:
        return float(sla.eigh(to_dense(A), to_dense(M), eigvals_only=True, subset_by_index=[0, 0])[0])

    linear = aslinearoperator(A)
    v = np.ones(n) / np.sqrt(n)
    estimate = np.inf
    for k in range(maxit):
        z, info = cg(linear, M @ v, rtol=tol * 1e-2, maxiter=10 * n)
        if info < 0:
            raise NonConvergedEigen(f"inner solve broke down at step {k}")
        v = z / np.sqrt(z @ (M @ z))
        previous, estimate = estimate, float(v @ (linear @ v))
        if abs(estimate - previous) <= tol * abs(estimate):
            logger.debug(f"Inverse iteration converged in {k + 1} steps: lambda_min={estimate:.6g}")
            return estimate
    raise NonConvergedEigen(f"inverse iteration did not converge in {maxit} steps (last {estimate:.6g})")

