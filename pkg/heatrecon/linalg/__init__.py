"""Factorizations and spectral estimates."""

from heatrecon.linalg.factorization import (
    LinearSolver,
    SolverCholesky,
    SolverDenseLDL,
    SolverSparseLU,
    check_residual,
    factorize,
    ruiz_scaling,
)
from heatrecon.linalg.spectra import condition_estimate, extreme_eigenvalues, min_generalized_eigenvalue

__all__ = [
    "LinearSolver",
    "SolverCholesky",
    "SolverDenseLDL",
    "SolverSparseLU",
    "check_residual",
    "condition_estimate",
    "extreme_eigenvalues",
    "factorize",
    "min_generalized_eigenvalue",
    "ruiz_scaling",
]
