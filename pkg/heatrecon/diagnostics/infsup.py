"""Module for the discrete inf-sup constant and the closed-form continuous ones.

    delta_h = inf over lambda of sup over y of b(y, lambda) / (||y|| ||lambda||)

is the square root of the smallest eigenvalue of the pencil (B G_Y^{-1} B^T, G_Lambda).
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sps
from loguru import logger
from scipy.sparse.linalg import LinearOperator

from heatrecon.enums.weights import Member
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.linalg.factorization import SolverCholesky
from heatrecon.linalg.spectra import min_generalized_eigenvalue
from heatrecon.secondorder.system import SaddleSystem
from heatrecon.weights.family import WeightFamily


def discrete_infsup(
    B: sps.spmatrix | np.ndarray,
    primal_gram: sps.spmatrix | np.ndarray,
    multiplier_gram: sps.spmatrix | np.ndarray,
    dense_limit: int = 500,
    tol: float = 1e-10,
    maxit: int = 200,
) -> float:
    """Smallest generalized singular value of B with respect to two Gram matrices.

    The primal Gram matrix is factorized once; the pencil is solved densely up to `dense_limit`
    multipliers and by inverse iteration above.

    Raises:
        NonConvergedEigen: if inverse iteration does not converge.
    """
    B = sps.csr_matrix(B)
    factor = SolverCholesky(sps.csr_matrix(primal_gram))
    n = B.shape[0]

    def schur(lam: np.ndarray) -> np.ndarray:
        return B @ factor.solve(B.T @ lam)

    if n <= dense_limit:
        S = B @ factor.solve(B.T.toarray())
        operator = 0.5 * (S + S.T)
    else:
        operator = LinearOperator((n, n), matvec=schur, dtype=float)
    smallest = min_generalized_eigenvalue(operator, sps.csr_matrix(multiplier_gram), dense_limit, tol, maxit)
    return math.sqrt(max(smallest, 0.0))


def estimate_infsup(system: SaddleSystem, dense_limit: int = 500, tol: float = 1e-10, maxit: int = 200) -> float:
    """delta_h of an assembled system, in the primal norm and the multiplier-space norm."""

    delta = discrete_infsup(system.B, system.primal_gram, system.multiplier_gram, dense_limit, tol, maxit)
    logger.info(f"Discrete inf-sup constant of {system.formulation.value}: {delta:.6g}")
    return delta


def infsup_constant_mf(family: WeightFamily, quadrature: QuadratureSet, eta: float) -> float:
    """(rho_star^{-2} ||rho||_inf^2 + eta)^{-1/2}."""
    sup = family.sup(Member.RHO, quadrature)
    return (sup**2 / family.rho_star**2 + eta) ** -0.5


def infsup_constant_mf4(
    family: WeightFamily, quadrature: QuadratureSet, eta1: float, eta2: float, continuity: float = 1.0
) -> float:
    """(max(C rho_star^{-2} ||rho_1||^2 + eta1, C rho_star^{-2} ||rho||^2 + eta2))^{-1/2}.

    Args:
        continuity: the continuity constant C of the first-order operators.
    """
    scale = continuity / family.rho_star**2
    flux = scale * family.sup(Member.RHO1, quadrature) ** 2 + eta1
    equation = scale * family.sup(Member.RHO, quadrature) ** 2 + eta2
    return max(flux, equation) ** -0.5


def multiplier_bound(delta: float, observation_norm: float) -> float:
    """Upper bound 2 delta^{-1} ||rho_0^{-1} y_obs|| of the multiplier norm."""
    return 2.0 * observation_norm / delta
