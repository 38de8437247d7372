"""Module for the typed, validated view of the experiment configuration.

Each block of the JSON configuration has a dataclass with a `load` classmethod that reads it through
`get_cfg` and a `validate` method raising the matching `ConfigError`. `ExperimentConfig.load` reads and
validates every block, so that a bad parameter is reported before any computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

from heatrecon.config import Config, get_cfg
from heatrecon.constants import SUPPORTED_ORDERS
from heatrecon.enums.formulations import Formulation, MultiplierKind, SolverMethod
from heatrecon.enums.weights import WeightKind
from heatrecon.errors import ConfigError, NonPositiveEps, UnsupportedOrder
from heatrecon.forward.coefficients import Coefficients, profile
from heatrecon.grid.mesh import SpaceTimeGrid, build_grid
from heatrecon.grid.quadrature import QuadratureSet, quadrature_points
from heatrecon.secondorder.formulations import check_alpha, check_penalty
from heatrecon.secondorder.solve import SolveOptions
from heatrecon.weights.beta import check_omega
from heatrecon.weights.family import WeightFamily

FORWARD_SOLVERS = ("theta", "mixed")
LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL")


def _enum(enum_cls, value, block: str):
    try:
        return enum_cls(value)
    except ValueError as e:
        choices = ", ".join(member.value for member in enum_cls)
        raise ConfigError(f"{block}: '{value}' is not one of {choices}") from e


@dataclass(frozen=True)
class GridSettings:
    x_min: float
    x_max: float
    T: float
    nx: int
    nt: int
    quadrature_order: int

    @classmethod
    def load(cls) -> GridSettings:
        return cls(
            x_min=float(get_cfg("grid", "x_min")),
            x_max=float(get_cfg("grid", "x_max")),
            T=float(get_cfg("grid", "T")),
            nx=get_cfg("grid", "nx"),
            nt=get_cfg("grid", "nt"),
            quadrature_order=get_cfg("grid", "quadrature_order"),
        )

    @property
    def domain(self) -> tuple[float, float]:
        return self.x_min, self.x_max

    def validate(self) -> None:
        if self.quadrature_order not in SUPPORTED_ORDERS:
            raise UnsupportedOrder(f"quadrature order must be one of {SUPPORTED_ORDERS}, got {self.quadrature_order}")
        self.build()

    def build(self, level: int = 0) -> SpaceTimeGrid:
        """The grid, with `level` uniform refinements."""
        return build_grid(self.x_min, self.x_max, self.T, self.nx * 2**level, self.nt * 2**level)

    def quadrature(self, grid: SpaceTimeGrid) -> QuadratureSet:
        return quadrature_points(grid, self.quadrature_order)


@dataclass(frozen=True)
class CoefficientSettings:
    """The preset descriptions of the `coefficients` block; `build` turns them into functions."""

    presets: dict
    c0: float

    @classmethod
    def load(cls) -> CoefficientSettings:
        presets = {name: get_cfg("coefficients", name) for name in ("c", "d", "f", "F", "y0")}
        return cls(presets=presets, c0=float(get_cfg("coefficients", "c0")))

    def validate(self, domain: tuple[float, float]) -> None:
        if not self.c0 > 0:
            raise ConfigError(f"coefficients: c0 must be positive, got {self.c0}")
        for spec in self.presets.values():
            profile(spec, domain)

    def build(self, domain: tuple[float, float]) -> Coefficients:
        return Coefficients.from_presets(self.presets, self.c0, domain)


@dataclass(frozen=True)
class WeightSettings:
    kind: WeightKind
    K1: float
    K2: float
    m: float
    rho_star: float
    log_cap: float
    power: float

    @classmethod
    def load(cls) -> WeightSettings:
        return cls(
            kind=_enum(WeightKind, get_cfg("weights", "kind"), "weights.kind"),
            K1=float(get_cfg("weights", "K1")),
            K2=float(get_cfg("weights", "K2")),
            m=float(get_cfg("weights", "m")),
            rho_star=float(get_cfg("weights", "rho_star")),
            log_cap=float(get_cfg("weights", "log_cap")),
            power=float(get_cfg("weights", "power")),
        )

    @property
    def reference_kind(self) -> WeightKind:
        """The Carleman family the stability estimates are measured in."""
        return self.kind if self.kind in (WeightKind.CARLEMAN_C, WeightKind.CARLEMAN_P) else WeightKind.CARLEMAN_C

    def validate(self) -> None:
        if not (self.K1 > 0 and self.K2 > 0):
            raise ConfigError(f"weights: K1 and K2 must be positive, got {self.K1}, {self.K2}")
        if not 0.0 < self.m < 1.0:
            raise ConfigError(f"weights: m must lie in (0, 1), got {self.m}")
        if not self.rho_star > 0:
            raise ConfigError(f"weights: rho_star must be positive, got {self.rho_star}")

    def build(self, grid: GridSettings, omega: tuple[float, float], reference: bool = False) -> WeightFamily:
        kind = self.reference_kind if reference else self.kind
        return WeightFamily.build(
            kind,
            grid.T,
            grid.domain,
            omega,
            K1=self.K1,
            K2=self.K2,
            m=self.m,
            rho_star=self.rho_star,
            log_cap=self.log_cap,
            power=self.power,
        )


@dataclass(frozen=True)
class ObservationSettings:
    omega: tuple[float, float]
    sigma: float
    seed: int | None

    @classmethod
    def load(cls) -> ObservationSettings:
        seed = get_cfg("observation", "seed")
        return cls(
            omega=(float(get_cfg("observation", "omega_a")), float(get_cfg("observation", "omega_b"))),
            sigma=float(get_cfg("observation", "sigma")),
            seed=None if seed is None else int(seed),
        )

    def validate(self, domain: tuple[float, float]) -> None:
        check_omega(self.omega, domain)
        if not self.sigma >= 0:
            raise ConfigError(f"observation: sigma must be non-negative, got {self.sigma}")


@dataclass(frozen=True)
class ForwardSettings:
    theta: float
    refinement: int
    solver: str

    @classmethod
    def load(cls) -> ForwardSettings:
        return cls(
            theta=float(get_cfg("forward", "theta")),
            refinement=get_cfg("forward", "refinement"),
            solver=get_cfg("forward", "solver"),
        )

    def validate(self) -> None:
        if not 0.5 <= self.theta <= 1.0:
            raise ConfigError(f"forward: theta must lie in [0.5, 1], got {self.theta}")
        if int(self.refinement) != self.refinement or self.refinement < 1:
            raise ConfigError(f"forward: refinement must be an integer >= 1, got {self.refinement}")
        if self.solver not in FORWARD_SOLVERS:
            raise ConfigError(f"forward: solver must be one of {', '.join(FORWARD_SOLVERS)}, got '{self.solver}'")


@dataclass(frozen=True)
class FormulationSettings:
    """The `formulation` block. Only the parameters of the selected formulation are validated."""

    name: Formulation
    multiplier: MultiplierKind
    r: float
    r1: float
    r2: float
    alpha: float
    alpha1: float
    alpha2: float
    eta: float
    eta1: float
    eta2: float
    jump: float
    eps: float
    unit_qr_weights: bool

    @classmethod
    def load(cls) -> FormulationSettings:
        return cls(
            name=_enum(Formulation, get_cfg("formulation", "name"), "formulation.name"),
            multiplier=_enum(MultiplierKind, get_cfg("formulation", "multiplier"), "formulation.multiplier"),
            **{
                key: float(get_cfg("formulation", key))
                for key in ("r", "r1", "r2", "alpha", "alpha1", "alpha2", "eta", "eta1", "eta2", "jump", "eps")
            },
            unit_qr_weights=bool(get_cfg("formulation", "unit_qr_weights")),
        )

    def validate(self) -> None:
        match self.name:
            case Formulation.MF:
                check_penalty("r", self.r)
                check_penalty("eta", self.eta, strict=True)
            case Formulation.MF_ALPHA:
                check_penalty("r", self.r)
                check_penalty("eta", self.eta, strict=True)
                check_alpha("alpha", self.alpha)
            case Formulation.MF4:
                for name in ("r1", "r2", "jump"):
                    check_penalty(name, getattr(self, name))
                for name in ("eta1", "eta2"):
                    check_penalty(name, getattr(self, name), strict=True)
            case Formulation.MF4_ALPHA:
                for name in ("r1", "r2"):
                    check_penalty(name, getattr(self, name))
                for name in ("eta1", "eta2"):
                    check_penalty(name, getattr(self, name), strict=True)
                check_alpha("alpha1", self.alpha1)
                check_alpha("alpha2", self.alpha2)
            case Formulation.QR:
                if not (math.isfinite(self.eps) and self.eps > 0):
                    raise NonPositiveEps(f"eps must be positive, got {self.eps}")
                check_penalty("eta", self.eta, strict=True)


@dataclass(frozen=True)
class SolverSettings:
    method: SolverMethod
    tol: float
    maxit: int
    options: SolveOptions

    @classmethod
    def load(cls) -> SolverSettings:
        return cls(
            method=_enum(SolverMethod, get_cfg("solver", "method"), "solver.method"),
            tol=float(get_cfg("solver", "tol")),
            maxit=int(get_cfg("solver", "maxit")),
            options=SolveOptions.load(),
        )

    def validate(self, formulation: Formulation) -> None:
        if not 0.0 < self.tol < 1.0:
            raise ConfigError(f"solver: tol must lie in (0, 1), got {self.tol}")
        if self.maxit < 0:
            raise ConfigError(f"solver: maxit must be >= 0, got {self.maxit}")
        if self.method is SolverMethod.DUAL and formulation is Formulation.QR:
            raise ConfigError("solver: qr has no multipliers, use the direct method")


@dataclass(frozen=True)
class DiagnosticSettings:
    continuity_constant: float
    dense_limit: int
    tol: float
    maxit: int
    coincidence: bool

    @classmethod
    def load(cls) -> DiagnosticSettings:
        return cls(
            continuity_constant=float(get_cfg("diagnostics", "continuity_constant")),
            dense_limit=int(get_cfg("diagnostics", "infsup_dense_limit")),
            tol=float(get_cfg("diagnostics", "eigen_tol")),
            maxit=int(get_cfg("diagnostics", "eigen_maxit")),
            coincidence=bool(get_cfg("diagnostics", "coincidence")),
        )


@dataclass(frozen=True)
class OutputSettings:
    directory: Path

    @classmethod
    def load(cls) -> OutputSettings:
        return cls(directory=Path(get_cfg("output", "directory")))


@dataclass(frozen=True)
class ExperimentConfig:
    """Every block of the configuration, validated."""

    grid: GridSettings
    coefficients: CoefficientSettings
    weights: WeightSettings
    observation: ObservationSettings
    forward: ForwardSettings
    formulation: FormulationSettings
    solver: SolverSettings
    diagnostics: DiagnosticSettings
    output: OutputSettings
    levels: int
    log_level: str

    @classmethod
    def load(cls) -> ExperimentConfig:
        """Reads the current configuration and validates it.

        Raises:
            ConfigError: for the first block violating a precondition.
        """
        settings = cls(
            grid=GridSettings.load(),
            coefficients=CoefficientSettings.load(),
            weights=WeightSettings.load(),
            observation=ObservationSettings.load(),
            forward=ForwardSettings.load(),
            formulation=FormulationSettings.load(),
            solver=SolverSettings.load(),
            diagnostics=DiagnosticSettings.load(),
            output=OutputSettings.load(),
            levels=get_cfg("sweep", "levels"),
            log_level=str(get_cfg("logging", "level")).upper(),
        )
        settings.validate()
        return settings

    def validate(self) -> None:
        self.grid.validate()
        self.coefficients.validate(self.grid.domain)
        self.weights.validate()
        self.observation.validate(self.grid.domain)
        self.forward.validate()
        self.formulation.validate()
        self.solver.validate(self.formulation.name)
        if self.log_level not in LOG_LEVELS:
            raise ConfigError(f"logging: unknown level '{self.log_level}'")

    @property
    def resolved(self) -> dict:
        """The configuration dictionary these settings were read from."""
        return Config.get_instance().data
