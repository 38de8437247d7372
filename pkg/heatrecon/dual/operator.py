"""Module for the dual operators of the augmented formulations.

For a multiplier lambda, y solves A_r y = B^T lambda and T_r lambda = M^{-1} B y is the projection of
rho^{-1} L y (first order: of (rho^{-1} I(y, p), rho1^{-1} J(y, p))) on the multiplier space, with M
the L2 Gram matrix of the multipliers.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sps
from loguru import logger
from scipy.sparse.linalg import LinearOperator

from heatrecon.errors import ConfigError, SingularAr
from heatrecon.linalg.factorization import SolverCholesky
from heatrecon.linalg.spectra import extreme_eigenvalues
from heatrecon.secondorder.system import SaddleSystem


class DualOperator:
    """The factorized primal block of a system and the operators it defines on the multipliers.

    Attributes:
        system: the assembled system.
        n: dimension of the multiplier space.
    """

    def __init__(self, system: SaddleSystem, dense_limit: int = 1500) -> None:
        """Factorizes A_r and the multiplier Gram matrix.

        Raises:
            ConfigError: if the system has no multipliers.
            SingularAr: if a penalty is zero or A_r is not positive definite.
        """
        if system.n_multiplier == 0:
            raise ConfigError(f"{system.formulation.value} has no multipliers to minimize over")
        for penalty in system.penalties:
            if not penalty.r > 0:
                raise SingularAr(f"{penalty.name} = {penalty.r}: the augmented block is singular")
        self.system = system
        self.n = system.n_multiplier
        self.A = system.primal_block()
        self.B = system.B
        self.C = system.stabilization()
        self.M = system.multiplier_l2_gram
        self.A_factor = SolverCholesky(self.A, dense_limit=dense_limit, error=SingularAr)
        self.M_factor = SolverCholesky(self.M, dense_limit=dense_limit)
        logger.debug(f"Dual operator of {system.formulation.value}: {self.n} multipliers")

    @property
    def penalties(self) -> dict[str, float]:
        return {penalty.name: penalty.r for penalty in self.system.penalties}

    @property
    def bound(self) -> float:
        """Upper bound of the norm of T_r: 1 / min(r)."""
        return 1.0 / min(self.penalties.values())

    def primal(self, lam: np.ndarray) -> np.ndarray:
        """y solving A_r y = B^T lambda."""
        return self.A_factor.solve(self.B.T @ lam)

    def coupled(self, lam: np.ndarray) -> np.ndarray:
        """B A_r^{-1} B^T lambda."""
        return self.B @ self.primal(lam)

    def tr(self, lam: np.ndarray) -> np.ndarray:
        """T_r lambda."""
        return self.M_factor.solve(self.coupled(lam))

    def schur(self, lam: np.ndarray) -> np.ndarray:
        """(B A_r^{-1} B^T + C) lambda, the operator of the dual functional."""
        return self.coupled(lam) + self.C @ lam

    def norm(self, lam: np.ndarray) -> float:
        """The L2 norm of a multiplier vector."""
        return float(np.sqrt(max(lam @ (self.M @ lam), 0.0)))

    def schur_operator(self) -> LinearOperator:
        return LinearOperator((self.n, self.n), matvec=self.schur, dtype=float)

    def preconditioner(self) -> LinearOperator:
        """M^{-1}."""
        return LinearOperator((self.n, self.n), matvec=self.M_factor.solve, dtype=float)


def apply_Tr(op: DualOperator, lam: np.ndarray) -> np.ndarray:
    """T_r lambda for a formulation with a single multiplier.

    Raises:
        ConfigError: if the formulation has a pair of multipliers.
    """
    if len(op.system.multiplier_spaces) != 1:
        raise ConfigError("apply_Tr needs a single multiplier; use apply_Tr_mixed for (lambda, mu)")
    return op.tr(np.asarray(lam, dtype=float))


def apply_Tr_mixed(op: DualOperator, lam: np.ndarray, mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """T_r (lambda, mu) for a first-order formulation.

    Raises:
        ConfigError: unless the formulation has a pair of multipliers.
    """
    if len(op.system.multiplier_spaces) != 2:
        raise ConfigError("apply_Tr_mixed needs the multiplier pair (lambda, mu)")
    image = op.tr(np.concatenate([lam, mu]))
    n = op.system.multiplier_spaces[0].n_free
    return image[:n], image[n:]


def spectrum(op: DualOperator, tol: float = 1e-10, maxiter: int | None = None) -> tuple[float, float]:
    """Extreme eigenvalues of T_r, that is of the pencil (B A_r^{-1} B^T, M).

    The smallest one is the discrete ellipticity constant of T_r; the largest is at most 1 / min(r).

    Raises:
        NonConvergedEigen: if Lanczos does not converge.
    """
    operator = LinearOperator((op.n, op.n), matvec=op.coupled, dtype=float)
    low, high = extreme_eigenvalues(operator, sps.csr_matrix(op.M), tol=tol, maxiter=maxiter)
    logger.info(f"Spectrum of T_r: [{low:.6g}, {high:.6g}], bound {op.bound:.6g}")
    return low, high
