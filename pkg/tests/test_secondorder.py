import numpy as np
import pytest
import scipy.sparse as sps

from heatrecon.enums.formulations import MultiplierKind
from heatrecon.enums.spaces import BasisKind
from heatrecon.errors import AlphaOutOfRange, ConfigError, FactorizationFailure, NonPositiveEps, UnsupportedSpace
from heatrecon.forward import Coefficients, Field
from heatrecon.grid import build_grid, make_space, quadrature_points
from heatrecon.grid.spaces import interpolate
from heatrecon.linalg import SolverDenseLDL
from heatrecon.observe import make_observation
from heatrecon.secondorder import (
    SolveOptions,
    apply_renormalization,
    assemble_mf,
    assemble_mf_alpha,
    assemble_qr,
    hermite_primal_space,
    solve_qr,
    solve_saddle,
)
from heatrecon.secondorder import solve as solve_module
from heatrecon.secondorder.solve import check_inertia


def _max_asymmetry(matrix):
    diff = abs(matrix - matrix.T)
    return diff.max() if diff.nnz else 0.0


def _relative(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def _p0_system(grid, family, random_observation, **kwargs):
    obs = random_observation(grid)
    return assemble_mf(hermite_primal_space(grid), MultiplierKind.P0, family, obs, Coefficients.constant(), **kwargs)


def _eigenmode(space):
    decay = lambda t: np.exp(-np.pi**2 * t)  # noqa: E731
    return interpolate(
        space,
        lambda x, t: decay(t) * np.sin(np.pi * x),
        dx=lambda x, t: np.pi * decay(t) * np.cos(np.pi * x),
        dt=lambda x, t: -np.pi**2 * decay(t) * np.sin(np.pi * x),
        dxdt=lambda x, t: -np.pi**3 * decay(t) * np.cos(np.pi * x),
    )


@pytest.mark.parametrize("multiplier", list(MultiplierKind))
def test_mf_matrix_is_exactly_symmetric(grid, carleman_c, random_observation, multiplier):
    obs = random_observation(grid)
    system = assemble_mf(hermite_primal_space(grid), multiplier, carleman_c, obs, Coefficients.constant(), r=1.0)
    assert _max_asymmetry(system.matrix()) == 0.0


def test_mf_alpha_matrix_is_exactly_symmetric(grid, carleman_c, random_observation):
    obs = random_observation(grid)
    system = assemble_mf_alpha(hermite_primal_space(grid), carleman_c, obs, Coefficients.constant(), alpha=0.3)
    assert _max_asymmetry(system.matrix()) == 0.0
    assert _max_asymmetry(system.C) == 0.0


def test_partition_sizes(grid, carleman_c, random_observation):
    obs = random_observation(grid)
    system = assemble_mf(hermite_primal_space(grid), MultiplierKind.P0, carleman_c, obs, Coefficients.constant())
    assert system.n_primal == 4 * 25 - 2 * 2 * 5
    assert system.n_multiplier == 16
    assert system.matrix().shape == (96, 96)


def test_zero_observation_gives_zero_solution(grid, carleman_c):
    quadrature = quadrature_points(grid, 3)
    zero = Field.zeros(make_space(BasisKind.BILINEAR_Q1, grid))
    obs = make_observation(zero, (0.25, 0.5), grid, quadrature)
    system = assemble_mf(hermite_primal_space(grid), MultiplierKind.P0, carleman_c, obs, Coefficients.constant())
    assert not np.any(system.rhs())
    report = solve_saddle(system)
    assert np.all(report.primal == 0.0)
    assert np.all(report.multiplier == 0.0)
    assert report.misfit == 0.0
    assert report.cost == 0.0


def test_primal_space_without_second_derivative_is_rejected(grid, carleman_c, random_observation):
    q1 = make_space(BasisKind.BILINEAR_Q1, grid)
    with pytest.raises(UnsupportedSpace):
        assemble_mf(q1, MultiplierKind.P0, carleman_c, random_observation(grid), Coefficients.constant())


@pytest.mark.parametrize("alpha", [0.0, 1.0, 1.2, -0.1])
def test_alpha_out_of_range(grid, carleman_c, random_observation, alpha):
    with pytest.raises(AlphaOutOfRange):
        assemble_mf_alpha(
            hermite_primal_space(grid), carleman_c, random_observation(grid), Coefficients.constant(), alpha=alpha
        )


def test_negative_penalty_is_rejected(grid, carleman_c, random_observation):
    with pytest.raises(ConfigError, match="r must be"):
        _p0_system(grid, carleman_c, random_observation, r=-1.0)


@pytest.mark.parametrize("r", [0.0, 1.0])
@pytest.mark.parametrize("multiplier", [MultiplierKind.P0, MultiplierKind.HERMITE])
def test_observation_bound_of_mf(grid, carleman_c, random_observation, r, multiplier):
    obs = random_observation(grid, seed=11)
    system = assemble_mf(hermite_primal_space(grid), multiplier, carleman_c, obs, Coefficients.constant(), r=r)
    report = solve_saddle(system)
    slack = 1e-10 if r else 1e-8
    assert report.observed_norm <= report.observation_norm * (1.0 + slack)
    assert report.misfit <= report.observation_norm * (1.0 + slack)


@pytest.mark.parametrize("r", [0.0, 1.0])
@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_observation_bound_of_mf_alpha(grid, carleman_c, random_observation, r, alpha):
    obs = random_observation(grid, seed=13)
    system = assemble_mf_alpha(hermite_primal_space(grid), carleman_c, obs, Coefficients.constant(), r=r, alpha=alpha)
    report = solve_saddle(system)
    ceiling = 0.5 * (1.0 + (1.0 - alpha) ** -0.5)
    assert report.observed_norm <= ceiling * report.observation_norm * (1.0 + 1e-8)


def test_alpha_blocks_converge_linearly_to_mf(grid, carleman_c, random_observation):
    obs = random_observation(grid)
    space = hermite_primal_space(grid)
    coeffs = Coefficients.constant()
    reference = assemble_mf(space, MultiplierKind.HERMITE, carleman_c, obs, coeffs, r=1.0).matrix()
    gaps = []
    for alpha in (1e-3, 1e-4):
        stabilized = assemble_mf_alpha(space, carleman_c, obs, coeffs, r=1.0, alpha=alpha).matrix()
        gaps.append(abs(stabilized - reference).max())
    assert gaps[1] == pytest.approx(0.1 * gaps[0], rel=1e-6)


def test_mf_and_mf_alpha_coincide_on_an_exact_state(exact_problem, unit_family):
    grid, space, truth, obs, coeffs = exact_problem()
    plain = solve_saddle(assemble_mf(space, MultiplierKind.HERMITE, unit_family, obs, coeffs))
    stabilized = solve_saddle(assemble_mf_alpha(space, unit_family, obs, coeffs, alpha=0.5))
    assert _relative(stabilized.primal, plain.primal) <= 1e-8
    assert _relative(plain.primal, truth.free_values) <= 1e-8
    assert np.max(np.abs(plain.multiplier)) <= 1e-8 * np.max(np.abs(plain.primal))
    assert plain.residuals["r"] <= 1e-6


def test_solution_does_not_depend_on_eta(grid, carleman_c, random_observation):
    obs = random_observation(grid)
    space = hermite_primal_space(grid)
    coeffs = Coefficients.constant()
    first = solve_saddle(assemble_mf(space, MultiplierKind.P0, carleman_c, obs, coeffs, r=1.0, eta=1.0))
    second = solve_saddle(assemble_mf(space, MultiplierKind.P0, carleman_c, obs, coeffs, r=1.0, eta=10.0))
    assert _relative(second.primal, first.primal) <= 1e-8
    assert second.primal_norm > first.primal_norm


def test_constraint_residual_of_eigenmode_is_second_order(unit_family):
    residuals = []
    for n in (8, 16):
        grid = build_grid(0.0, 1.0, 0.5, n, n)
        space = hermite_primal_space(grid)
        y = Field(space, _eigenmode(space))
        obs = make_observation(y, (0.25, 0.5), grid, quadrature_points(grid, 3))
        system = assemble_mf(space, MultiplierKind.P0, unit_family, obs, Coefficients.constant())
        block = system.B @ y.free_values - system.l2
        residuals.append(np.sqrt(np.sum(block**2) / grid.cell_area))
    assert np.log2(residuals[0] / residuals[1]) >= 1.8


@pytest.mark.slow
def test_multiplier_vanishes_under_refinement_for_consistent_data(unit_family):
    norms = []
    for n in (8, 16, 32):
        grid = build_grid(0.0, 1.0, 0.5, n, n)
        fine = make_space(BasisKind.HERMITE_C1_TENSOR, grid.refined(4))
        obs = make_observation(Field(fine, _eigenmode(fine)), (0.25, 0.5), grid, quadrature_points(grid, 3))
        system = assemble_mf(hermite_primal_space(grid), MultiplierKind.P0, unit_family, obs, Coefficients.constant())
        norms.append(solve_saddle(system).multiplier_norm)
    assert norms[0] > norms[1] > norms[2]
    # first order in h with piecewise constant multipliers
    assert norms[2] <= 0.35 * norms[0]


def test_retry_ladder_renormalizes_after_a_failure(grid, carleman_c, random_observation, monkeypatch):
    calls = []
    original = solve_module.factorize

    def flaky(matrix, dense_limit):
        calls.append(matrix.shape)
        if len(calls) == 1:
            raise FactorizationFailure("injected")
        return original(matrix, dense_limit)

    monkeypatch.setattr(solve_module, "factorize", flaky)
    system = _p0_system(grid, carleman_c, random_observation)
    report = solve_saddle(system)
    assert len(calls) == 2
    assert report.stats["retries"] == 1
    assert report.stats["renormalized"] is True


def test_retry_ladder_raises_penalties(grid, carleman_c, random_observation, monkeypatch):
    calls = []
    original = solve_module.factorize

    def flaky(matrix, dense_limit):
        calls.append(matrix.shape)
        if len(calls) <= 2:
            raise FactorizationFailure("injected")
        return original(matrix, dense_limit)

    monkeypatch.setattr(solve_module, "factorize", flaky)
    system = _p0_system(grid, carleman_c, random_observation, r=0.0)
    report = solve_saddle(system, SolveOptions(min_penalty=1e-3))
    assert report.stats["final_r"] == pytest.approx(1e-3)


def test_retry_ladder_gives_up(grid, carleman_c, random_observation, monkeypatch):
    def broken(matrix, dense_limit):
        raise FactorizationFailure("injected")

    monkeypatch.setattr(solve_module, "factorize", broken)
    system = _p0_system(grid, carleman_c, random_observation)
    with pytest.raises(FactorizationFailure, match="injected"):
        solve_saddle(system, SolveOptions(max_retries=2))


def test_unit_weights_give_identity_renormalization(grid, unit_family, random_observation):
    system = _p0_system(grid, unit_family, random_observation)
    renormalization = apply_renormalization(system)
    assert np.all(renormalization.scaling == 1.0)
    assert renormalization.condition_after == pytest.approx(renormalization.condition_before, rel=1e-10)


def test_renormalization_averages_rho0_over_each_support(grid, carleman_c, random_observation):
    system = _p0_system(grid, carleman_c, random_observation)
    space = system.primal_spaces[0]
    rho0 = 1.0 / system.context.rho0_inv
    factors = apply_renormalization(system).scaling[: system.n_primal]
    for factor, dof in zip(factors, np.flatnonzero(space.free)):
        support = np.any(space.cell_dofs == dof, axis=1)
        assert rho0[support].min() * (1.0 - 1e-12) <= factor <= rho0[support].max() * (1.0 + 1e-12)


def test_inertia_check_tolerates_only_unreliable_pivots():
    assert check_inertia(SolverDenseLDL(np.diag([1.0, -1.0])), 1, 1)
    assert not check_inertia(SolverDenseLDL(np.diag([1.0, 1e-30])), 1, 1)
    with pytest.raises(FactorizationFailure, match="wrong inertia"):
        check_inertia(SolverDenseLDL(np.diag([1.0, 1.0])), 1, 1)


def test_carleman_solves_record_their_inertia(grid, carleman_c, random_observation):
    system = _p0_system(grid, carleman_c, random_observation)
    report = solve_saddle(system)
    assert report.stats["inertia_zero"] == 0
    assert report.stats["residual"] <= 1e-8


def test_renormalized_solve_matches_plain_solve(grid, carleman_c, random_observation):
    system = _p0_system(grid, carleman_c, random_observation)
    plain = solve_saddle(system)
    scaled = solve_saddle(system, SolveOptions(renormalize=True))
    assert _relative(scaled.primal, plain.primal) <= 1e-6
    assert scaled.stats["renormalized"] is True


@pytest.mark.slow
def test_renormalization_improves_conditioning(carleman_c, random_observation):
    grid = build_grid(0.0, 1.0, 0.5, 16, 16)
    system = _p0_system(grid, carleman_c, random_observation)
    renormalization = apply_renormalization(system)
    assert renormalization.condition_after < renormalization.condition_before


def test_qr_rejects_non_positive_eps(grid, carleman_c, random_observation):
    with pytest.raises(NonPositiveEps):
        assemble_qr(hermite_primal_space(grid), carleman_c, random_observation(grid), Coefficients.constant(), eps=0.0)


def test_qr_solution_shrinks_as_eps_grows(grid, power_family, random_observation):
    obs = random_observation(grid)
    space = hermite_primal_space(grid)
    norms = []
    for eps in (1.0, 10.0, 100.0):
        report = solve_qr(assemble_qr(space, power_family, obs, Coefficients.constant(), eps=eps))
        assert report.stats["min_eigenvalue"] > 0.0
        norms.append(report.primal_norm)
    assert norms[0] > norms[1] > norms[2]


@pytest.mark.parametrize("unit_weights", [False, True])
def test_qr_misfit_decreases_with_eps_on_consistent_data(exact_problem, power_family, unit_weights):
    grid, space, truth, obs, coeffs = exact_problem()
    misfits = []
    for eps in (1e-2, 1e-4, 1e-6):
        system = assemble_qr(space, power_family, obs, coeffs, eps=eps, unit_weights=unit_weights)
        report = solve_qr(system)
        assert report.stats["min_eigenvalue"] > 0.0
        misfits.append(report.misfit)
    assert misfits[0] > misfits[1] > misfits[2]


def test_qr_system_has_no_multipliers(grid, carleman_c, random_observation):
    obs = random_observation(grid)
    system = assemble_qr(hermite_primal_space(grid), carleman_c, obs, Coefficients.constant(), eps=1.0)
    assert system.n_multiplier == 0
    assert sps.issparse(system.matrix())
    assert system.matrix().shape == (system.n_primal, system.n_primal)
