import math

import numpy as np
import pytest
import scipy.sparse as sps

from heatrecon.errors import FactorizationFailure, SingularAr
from heatrecon.linalg import (
    SolverCholesky,
    SolverDenseLDL,
    SolverSparseLU,
    check_residual,
    condition_estimate,
    extreme_eigenvalues,
    factorize,
    min_generalized_eigenvalue,
    ruiz_scaling,
)


def laplacian(n):
    return sps.diags([-np.ones(n - 1), 2.0 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1], format="csr")


@pytest.fixture
def saddle():
    return sps.csr_matrix(np.array([[2.0, 0.0, 1.0], [0.0, 2.0, 1.0], [1.0, 1.0, 0.0]]))


@pytest.fixture
def spd(rng):
    factor = rng.standard_normal((50, 50))
    return factor @ factor.T + 50.0 * np.eye(50)


def test_ldl_solves_a_saddle_point_system_and_reports_inertia(saddle):
    solver = SolverDenseLDL(saddle)
    rhs = np.array([1.0, 2.0, 3.0])
    x = solver.solve(rhs)
    assert np.allclose(saddle @ x, rhs, rtol=0.0, atol=1e-13)
    assert solver.inertia == (2, 1, 0)


def test_ldl_rejects_a_singular_matrix():
    with pytest.raises(FactorizationFailure):
        SolverDenseLDL(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_factorize_switches_to_sparse_lu_above_the_dense_limit(saddle):
    assert isinstance(factorize(saddle, dense_limit=3), SolverDenseLDL)
    solver = factorize(saddle, dense_limit=2)
    assert isinstance(solver, SolverSparseLU)
    x = solver.solve(np.ones(3))
    assert np.allclose(saddle @ x, np.ones(3), rtol=0.0, atol=1e-13)


@pytest.mark.parametrize("dense_limit", [0, 1500])
def test_cholesky_dense_and_sparse_paths_agree(spd, rng, dense_limit):
    rhs = rng.standard_normal(50)
    x = SolverCholesky(sps.csr_matrix(spd), dense_limit=dense_limit).solve(rhs)
    assert np.allclose(spd @ x, rhs, rtol=0.0, atol=1e-10)


def test_cholesky_raises_the_requested_error_on_an_indefinite_matrix():
    with pytest.raises(SingularAr):
        SolverCholesky(np.diag([1.0, -1.0]), error=SingularAr)


def test_residual_check(saddle):
    rhs = np.array([1.0, 2.0, 3.0])
    x = SolverDenseLDL(saddle).solve(rhs)
    assert check_residual(saddle, x, rhs) <= 1e-14
    with pytest.raises(FactorizationFailure):
        check_residual(saddle, x + 1.0, rhs)
    with pytest.raises(FactorizationFailure, match="non-finite"):
        check_residual(saddle, np.full(3, np.nan), rhs)


def test_ldl_keeps_tiny_nonzero_pivots():
    matrix = np.diag([1.0, 1e-29, -1.0])
    solver = SolverDenseLDL(matrix)
    assert solver.inertia == (2, 1, 0)
    assert np.allclose(solver.solve(np.array([1.0, 1e-29, 2.0])), [1.0, 1.0, -2.0], rtol=1e-14, atol=0.0)


def test_residual_check_sees_errors_in_small_rows():
    matrix = sps.diags([1e40, 1.0], format="csr")
    rhs = np.ones(2)
    assert check_residual(matrix, np.array([1e-40, 1.0]), rhs) <= 1e-14
    with pytest.raises(FactorizationFailure, match="relative residual"):
        check_residual(matrix, np.array([1e-40, 2.0]), rhs)


def test_ruiz_scaling_equilibrates_a_diagonal_matrix():
    matrix = sps.diags([100.0, 4.0, 0.01], format="csr")
    d = ruiz_scaling(matrix)
    assert np.allclose(d, [0.1, 0.5, 10.0], rtol=1e-14)


def test_condition_estimate_dense_and_lanczos():
    matrix = sps.diags(np.linspace(1.0, 100.0, 40), format="csr")
    assert condition_estimate(matrix) == pytest.approx(100.0, rel=1e-12)
    assert condition_estimate(matrix, dense_limit=0) == pytest.approx(100.0, rel=1e-6)


def test_extreme_eigenvalues_of_a_pencil(spd):
    mass = sps.diags(np.linspace(1.0, 2.0, 50), format="csr")
    low, high = extreme_eigenvalues(spd, mass, tol=1e-12)
    expected = np.linalg.eigvalsh(np.diag(mass.diagonal() ** -0.5) @ spd @ np.diag(mass.diagonal() ** -0.5))
    assert low == pytest.approx(expected[0], rel=1e-8)
    assert high == pytest.approx(expected[-1], rel=1e-8)


def test_min_generalized_eigenvalue_by_inverse_iteration():
    n = 30
    expected = 2.0 - 2.0 * math.cos(math.pi / (n + 1))
    identity = sps.identity(n, format="csr")
    assert min_generalized_eigenvalue(laplacian(n), identity) == pytest.approx(expected, rel=1e-12)
    assert min_generalized_eigenvalue(laplacian(n), identity, dense_limit=0) == pytest.approx(expected, rel=1e-8)
