import math

import numpy as np
import pytest

from heatrecon.config import set_cfg
from heatrecon.errors import ConfigError, InvalidCoefficients, SingularStep, UnknownPreset
from heatrecon.forward import Coefficients, solve_forward, solve_forward_mixed, verify_energy_estimate
from heatrecon.forward.coefficients import profile
from heatrecon.forward.spatial import SpatialDiscretization
from heatrecon.grid import build_grid, quadrature_points


def eigenmode(x):
    return np.sin(np.pi * x)


def exact_state(x, t, d=0.0):
    return np.exp(-(np.pi**2 + d) * t) * np.sin(np.pi * x)


def exact_flux(x, t):
    return np.pi * np.exp(-(np.pi**2) * t) * np.cos(np.pi * x)


def state_error(n, d=0.0):
    grid = build_grid(0.0, 1.0, 0.5, n, n)
    quadrature = quadrature_points(grid, 3)
    y = solve_forward(grid, Coefficients.constant(d=d, y0=eigenmode))
    diff = y.at_quadrature(quadrature) - exact_state(quadrature.x, quadrature.t, d)
    return math.sqrt(quadrature.integrate(diff**2))


def test_zero_data_gives_zero_state(grid):
    y = solve_forward(grid, Coefficients.constant())
    assert np.all(y.values == 0.0)


def test_crank_nicolson_converges_at_second_order():
    coarse, fine = state_error(16), state_error(32)
    assert math.log2(coarse / fine) >= 1.9


def test_potential_adds_exponential_decay():
    assert state_error(32, d=1.0) < 2e-3


def test_backward_euler_is_available(grid):
    y = solve_forward(grid, Coefficients.constant(y0=eigenmode), theta=1.0)
    assert np.all(np.isfinite(y.values))


@pytest.mark.parametrize("theta", [0.4, 1.1])
def test_theta_out_of_range(grid, theta):
    with pytest.raises(ConfigError):
        solve_forward(grid, Coefficients.constant(), theta=theta)


def test_non_finite_potential_breaks_the_step(grid):
    with pytest.raises(SingularStep):
        solve_forward(grid, Coefficients.constant(d=np.nan, y0=eigenmode))


def test_spatial_norm_never_increases_without_source():
    grid = build_grid(0.0, 1.0, 0.5, 16, 16)
    bump = lambda x: np.where(np.abs(x - 0.4) < 0.2, 1.0 - ((x - 0.4) / 0.2) ** 2, 0.0)  # noqa: E731
    y = solve_forward(grid, Coefficients.constant(d=0.5, y0=bump))
    mass = SpatialDiscretization(grid, Coefficients.constant()).mass
    levels = y.values.reshape(grid.nt + 1, grid.nx + 1)[:, 1:-1]
    norms = np.array([level @ (mass @ level) for level in levels])
    assert np.all(np.diff(norms) <= 1e-14)


def test_mixed_solver_recovers_the_flux():
    errors = []
    for n in (16, 32):
        grid = build_grid(0.0, 1.0, 0.5, n, n)
        quadrature = quadrature_points(grid, 3)
        _, p = solve_forward_mixed(grid, Coefficients.constant(y0=eigenmode))
        diff = p.at_quadrature(quadrature) - exact_flux(quadrature.x, quadrature.t)
        errors.append(math.sqrt(quadrature.integrate(diff**2)))
    assert errors[1] < 0.6 * errors[0]
    assert errors[1] < 0.1


def test_mixed_solver_matches_the_theta_scheme_without_flux_source():
    grid = build_grid(0.0, 1.0, 0.5, 16, 16)
    coeffs = Coefficients.constant(d=0.3, y0=eigenmode)
    y_mixed, _ = solve_forward_mixed(grid, coeffs)
    y = solve_forward(grid, coeffs)
    np.testing.assert_allclose(y_mixed.values, y.values, atol=1e-12)


def test_zero_data_gives_zero_pair(grid):
    y, p = solve_forward_mixed(grid, Coefficients.constant())
    assert np.all(y.values == 0.0) and np.all(p.values == 0.0)


def test_energy_estimate_is_vacuous_for_zero_data(grid):
    coeffs = Coefficients.constant()
    report = verify_energy_estimate(*solve_forward_mixed(grid, coeffs), coeffs)
    assert report.lhs == 0.0 and report.rhs == 0.0
    assert report.passed


def test_energy_estimate_is_linear_in_the_data(grid):
    coeffs = Coefficients.constant(y0=eigenmode, f=lambda x, t: x * (1.0 - x), F=lambda x, t: t + 0.0 * x)
    report = verify_energy_estimate(*solve_forward_mixed(grid, coeffs), coeffs)
    doubled = coeffs.scaled(2.0)
    report2 = verify_energy_estimate(*solve_forward_mixed(grid, doubled), doubled)
    assert report2.lhs == pytest.approx(2.0 * report.lhs, rel=1e-12)
    assert report2.ratio == pytest.approx(report.ratio, rel=1e-12)


def test_energy_constant_is_stable_under_refinement():
    coeffs = Coefficients.constant(y0=eigenmode)
    ratios = []
    for n in (16, 32):
        grid = build_grid(0.0, 1.0, 0.5, n, n)
        ratios.append(verify_energy_estimate(*solve_forward_mixed(grid, coeffs), coeffs).ratio)
    assert 0.5 <= ratios[1] / ratios[0] <= 2.0


def test_diffusion_below_ellipticity_constant(quadrature):
    coeffs = Coefficients(c=lambda x: 0.5 + 0.0 * x, c_x=lambda x: 0.0 * x, c0=1.0)
    with pytest.raises(InvalidCoefficients):
        coeffs.validate(quadrature)


def test_coefficients_from_configuration(quadrature):
    set_cfg("coefficients", "c", value={"preset": "polynomial", "coefficients": [1.0, 0.5]})
    coeffs = Coefficients.load((0.0, 1.0))
    coeffs.validate(quadrature)
    np.testing.assert_allclose(coeffs.c_x(np.array([0.2, 0.7])), 0.5)
    np.testing.assert_allclose(coeffs.y0(np.array([0.5])), 1.0)


def test_unknown_preset():
    with pytest.raises(UnknownPreset):
        profile({"preset": "spline"}, (0.0, 1.0))
