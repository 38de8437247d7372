from dataclasses import replace

import pytest

from heatrecon.config import set_cfg
from heatrecon.enums.formulations import Formulation, MultiplierKind, SolverMethod
from heatrecon.enums.weights import WeightKind
from heatrecon.errors import (
    AlphaOutOfRange,
    ConfigError,
    InvalidExtent,
    NonPositiveEps,
    OmegaOutsideDomain,
    UnknownPreset,
    UnsupportedOrder,
)
from heatrecon.settings import ExperimentConfig


def test_defaults_are_valid():
    settings = ExperimentConfig.load()
    assert settings.formulation.name is Formulation.MF
    assert settings.formulation.multiplier is MultiplierKind.P0
    assert settings.solver.method is SolverMethod.DIRECT
    assert settings.weights.kind is WeightKind.CARLEMAN_C
    assert settings.observation.omega == (0.25, 0.5)
    assert settings.grid.build(level=1).nx == 2 * settings.grid.nx
    assert settings.resolved["grid"]["nx"] == settings.grid.nx


def test_alpha_is_checked_before_any_computation():
    set_cfg("formulation", "name", value="mf-alpha")
    set_cfg("formulation", "alpha", value=1.2)
    with pytest.raises(AlphaOutOfRange):
        ExperimentConfig.load()


def test_parameters_of_other_formulations_are_ignored():
    set_cfg("formulation", "alpha", value=1.2)
    assert ExperimentConfig.load().formulation.alpha == 1.2


@pytest.mark.parametrize("name", ["alpha1", "alpha2"])
def test_first_order_alphas(name):
    set_cfg("formulation", "name", value="mf4-alpha")
    set_cfg("formulation", name, value=0.0)
    with pytest.raises(AlphaOutOfRange, match=name):
        ExperimentConfig.load()


def test_negative_penalty():
    set_cfg("formulation", "r", value=-1.0)
    with pytest.raises(ConfigError, match="r must be >= 0"):
        ExperimentConfig.load()


def test_qr_needs_a_positive_eps():
    set_cfg("formulation", "name", value="qr")
    set_cfg("formulation", "eps", value=0.0)
    with pytest.raises(NonPositiveEps):
        ExperimentConfig.load()


def test_qr_cannot_be_solved_by_the_dual_method():
    set_cfg("formulation", "name", value="qr")
    set_cfg("solver", "method", value="dual")
    with pytest.raises(ConfigError, match="no multipliers"):
        ExperimentConfig.load()


@pytest.mark.parametrize(
    ("keys", "value", "error"),
    [
        (("formulation", "name"), "mf5", ConfigError),
        (("solver", "method"), "gmres", ConfigError),
        (("weights", "kind"), "gaussian", ConfigError),
        (("grid", "quadrature_order"), 5, UnsupportedOrder),
        (("grid", "nx"), 0, InvalidExtent),
        (("grid", "T"), -1.0, InvalidExtent),
        (("observation", "omega_b"), 1.0, OmegaOutsideDomain),
        (("observation", "sigma"), -0.1, ConfigError),
        (("coefficients", "y0"), {"preset": "spline"}, UnknownPreset),
        (("coefficients", "c0"), 0.0, ConfigError),
        (("weights", "m"), 1.0, ConfigError),
        (("forward", "theta"), 0.25, ConfigError),
        (("forward", "refinement"), 0, ConfigError),
        (("forward", "solver"), "euler", ConfigError),
        (("logging", "level"), "LOUD", ConfigError),
    ],
)
def test_invalid_values(keys, value, error):
    set_cfg(*keys, value=value)
    with pytest.raises(error):
        ExperimentConfig.load()


def test_reference_family_is_carleman():
    set_cfg("weights", "kind", value="unit")
    settings = ExperimentConfig.load()
    assert settings.weights.reference_kind is WeightKind.CARLEMAN_C
    family = settings.weights.build(settings.grid, settings.observation.omega, reference=True)
    assert family.kind is WeightKind.CARLEMAN_C
    assert settings.weights.build(settings.grid, settings.observation.omega).kind is WeightKind.UNIT


def test_builders_use_the_validated_values():
    settings = ExperimentConfig.load()
    weights = replace(settings.weights, K1=2.0, power=3.0)
    coefficients = replace(settings.coefficients, c0=0.5)
    set_cfg("weights", "K1", value=5.0)
    set_cfg("coefficients", "c0", value=0.9)
    family = weights.build(settings.grid, settings.observation.omega)
    assert family.beta.K1 == 2.0
    assert family.power == 3.0
    assert coefficients.build(settings.grid.domain).c0 == 0.5
