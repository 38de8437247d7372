"""Shared fixtures of the test suite."""

import json

import numpy as np
import pytest

from heatrecon.config import Config, merge
from heatrecon.enums.spaces import BasisKind
from heatrecon.enums.weights import WeightKind
from heatrecon.firstorder import PairField, pair_spaces
from heatrecon.forward import Coefficients, Field
from heatrecon.grid import build_grid, make_space, quadrature_points
from heatrecon.grid.spaces import interpolate
from heatrecon.observe import make_observation
from heatrecon.weights import WeightFamily, build_beta


@pytest.fixture(autouse=True)
def default_config():
    """Every test starts from the packaged configuration."""

    Config.get_instance().reset()
    yield
    Config.get_instance().reset()


@pytest.fixture
def grid():
    return build_grid(0.0, 1.0, 0.5, 4, 4)


@pytest.fixture
def quadrature(grid):
    return quadrature_points(grid, 3)


@pytest.fixture
def beta():
    return build_beta(1.0, 1.0, (0.25, 0.5), 0.5, (0.0, 1.0))


@pytest.fixture
def carleman_c(beta):
    return WeightFamily(WeightKind.CARLEMAN_C, beta=beta, rho_star=1e-3, log_cap=40.0, T=0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def unit_family():
    return WeightFamily(WeightKind.UNIT, rho_star=1.0, log_cap=0.0, T=0.5)


@pytest.fixture
def power_family():
    return WeightFamily(WeightKind.POWER, rho_star=1e-3, power=1.0, T=0.5)


def exact_state(x, t):
    """A state reproduced exactly by the Hermite space: x(1 - x)(1 + t)."""
    return x * (1.0 - x) * (1.0 + t)


def exact_source(x, t):
    """L applied to `exact_state` for c = 1, d = 0."""
    return x * (1.0 - x) + 2.0 * (1.0 + t)


@pytest.fixture
def exact_problem():
    """Builds (grid, primal space, truth, observation, coefficients) for the Hermite-exact state."""

    def build(nx=4, nt=4, omega=(0.25, 0.5), sigma=0.0, seed=None):
        grid = build_grid(0.0, 1.0, 0.5, nx, nt)
        quadrature = quadrature_points(grid, 3)
        space = make_space(BasisKind.HERMITE_C1_TENSOR, grid)
        values = interpolate(
            space,
            exact_state,
            dx=lambda x, t: (1.0 - 2.0 * x) * (1.0 + t),
            dt=lambda x, t: x * (1.0 - x),
            dxdt=lambda x, t: 1.0 - 2.0 * x,
        )
        truth = Field(space, values)
        obs = make_observation(truth, omega, grid, quadrature, sigma=sigma, seed=seed)
        coeffs = Coefficients.constant(f=exact_source)
        return grid, space, truth, obs, coeffs

    return build


@pytest.fixture
def random_observation():
    """Pure-noise observation on a grid: random data of unit size."""

    def build(grid, seed=7, omega=(0.25, 0.5)):
        quadrature = quadrature_points(grid, 3)
        zero = Field.zeros(make_space(BasisKind.BILINEAR_Q1, grid))
        return make_observation(zero, omega, grid, quadrature, sigma=1.0, seed=seed)

    return build


def hat(x):
    return np.interp(x, [0.0, 0.5, 1.0], [0.0, 1.0, 0.0])


def hat_slope(x):
    return np.where(x < 0.5, 2.0, -2.0)


@pytest.fixture
def pair_problem():
    """Builds (grid, pair spaces, truth pair, observation, coefficients) for a bilinear-exact pair.

    y = hat(x)(1 + t) and p = (1 + t)(x - 1/2); the sources f and F make (y, p) an exact solution for
    c = 1, d = 0. nx must be even.
    """
    def build(nx=4, nt=4, omega=(0.25, 0.5)):
        grid = build_grid(0.0, 1.0, 0.5, nx, nt)
        quadrature = quadrature_points(grid, 3)
        spaces = pair_spaces(grid)
        y = Field(spaces[0], interpolate(spaces[0], lambda x, t: hat(x) * (1.0 + t)))
        p = Field(spaces[1], interpolate(spaces[1], lambda x, t: (1.0 + t) * (x - 0.5)))
        obs = make_observation(y, omega, grid, quadrature)
        coeffs = Coefficients.constant(
            f=lambda x, t: hat(x) - (1.0 + t),
            F=lambda x, t: hat_slope(x) * (1.0 + t) - (1.0 + t) * (x - 0.5),
        )
        return grid, spaces, PairField(y, p), obs, coeffs

    return build


@pytest.fixture
def config_file(tmp_path):
    """Writes a small experiment configuration, overlaid with `changes`, and returns its path.

    The artifacts go to tmp_path / "run" unless `changes` names another directory.
    """

    def build(changes=None, name="config.json"):
        base = {
            "grid": {"nx": 4, "nt": 4},
            "weights": {"kind": "power"},
            "output": {"directory": str(tmp_path / "run")},
            "logging": {"level": "WARNING"},
        }
        path = tmp_path / name
        path.write_text(json.dumps(merge(base, changes or {})), encoding="utf_8")
        return path

    return build
