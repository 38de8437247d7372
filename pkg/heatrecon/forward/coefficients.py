"""Module for the coefficients and data of the parabolic equation.

Every callable is vectorized: spatial functions take an array of abscissae, space-time functions
take broadcastable arrays (x, t).
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass, replace

import numpy as np
from loguru import logger

from heatrecon.config import get_cfg
from heatrecon.errors import InvalidCoefficients, UnknownPreset
from heatrecon.grid.quadrature import QuadratureSet

SpaceFunction = Callable[[np.ndarray], np.ndarray]
SpaceTimeFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _zero(x: np.ndarray, t: np.ndarray | None = None) -> np.ndarray:
    return np.zeros(np.broadcast(np.asarray(x), np.asarray(0.0 if t is None else t)).shape)


@dataclass(frozen=True)
class Coefficients:
    """Coefficients and data of y_t - (c y_x)_x + d y = f, y(0) = y0, with flux source F.

    Attributes:
        c: diffusion c(x) >= c0.
        c_x: derivative of c.
        d: potential d(x, t).
        f: source f(x, t).
        F: flux source F(x, t) of the first-order form c y_x - p = F.
        y0: initial datum.
        c0: ellipticity constant.
    """

    c: SpaceFunction
    c_x: SpaceFunction
    d: SpaceTimeFunction = _zero
    f: SpaceTimeFunction = _zero
    F: SpaceTimeFunction = _zero
    y0: SpaceFunction = _zero
    c0: float = 1.0

    @classmethod
    def constant(
        cls,
        c: float = 1.0,
        d: float = 0.0,
        y0: SpaceFunction = _zero,
        f: SpaceTimeFunction = _zero,
        F: SpaceTimeFunction = _zero,
    ) -> Coefficients:
        """Constant diffusion and potential."""
        return cls(
            c=lambda x: np.full(np.shape(x), float(c)),
            c_x=lambda x: np.zeros(np.shape(x)),
            d=lambda x, t: np.full(np.broadcast(np.asarray(x), np.asarray(t)).shape, float(d)),
            f=f,
            F=F,
            y0=y0,
            c0=float(c),
        )

    @classmethod
    def load(cls, domain: tuple[float, float]) -> Coefficients:
        """Builds the coefficients from the presets of the `coefficients` configuration block."""

        presets = {name: get_cfg("coefficients", name) for name in ("c", "d", "f", "F", "y0")}
        return cls.from_presets(presets, float(get_cfg("coefficients", "c0")), domain)

    @classmethod
    def from_presets(cls, presets: dict, c0: float, domain: tuple[float, float]) -> Coefficients:
        """Builds the coefficients from preset descriptions keyed by c, d, f, F and y0."""

        c, c_x = profile(presets["c"], domain)
        d, _ = profile(presets["d"], domain)
        f, _ = profile(presets["f"], domain)
        F, _ = profile(presets["F"], domain)
        y0, _ = profile(presets["y0"], domain)
        return cls(
            c=c,
            c_x=c_x,
            d=_steady(d),
            f=_steady(f),
            F=_steady(F),
            y0=y0,
            c0=float(c0),
        )

    def scaled(self, factor: float) -> Coefficients:
        """The same equation with (y0, f, F) multiplied by `factor`."""

        return replace(
            self,
            f=lambda x, t: factor * self.f(x, t),
            F=lambda x, t: factor * self.F(x, t),
            y0=lambda x: factor * self.y0(x),
        )

    def with_data(
        self, f: SpaceTimeFunction | None = None, F: SpaceTimeFunction | None = None, y0: SpaceFunction | None = None
    ) -> Coefficients:
        """The same operator with other data."""

        return replace(
            self,
            f=self.f if f is None else f,
            F=self.F if F is None else F,
            y0=self.y0 if y0 is None else y0,
        )

    def validate(self, quadrature: QuadratureSet) -> None:
        """Checks ellipticity and finiteness by sampling at the quadrature points.

        Raises:
            InvalidCoefficients: if c < c0 somewhere, c0 <= 0 or some sample is not finite.
        """
        if not self.c0 > 0:
            raise InvalidCoefficients(f"c0 must be positive, got {self.c0}")
        x, t = quadrature.x, quadrature.t
        c = np.asarray(self.c(np.unique(x)), dtype=float)
        if not np.all(np.isfinite(c)) or np.any(c < self.c0):
            raise InvalidCoefficients(f"c must satisfy c >= c0 = {self.c0}, min sample {np.nanmin(c)}")
        for name in ("d", "f", "F"):
            values = np.asarray(getattr(self, name)(x, t), dtype=float)
            if not np.all(np.isfinite(values)):
                raise InvalidCoefficients(f"{name} is not finite at every quadrature point")
        if not np.all(np.isfinite(np.asarray(self.y0(np.unique(x)), dtype=float))):
            raise InvalidCoefficients("y0 is not finite at every quadrature abscissa")
        logger.debug(f"Coefficients validated on {x.size} quadrature points")


def _steady(fn: SpaceFunction) -> SpaceTimeFunction:
    return lambda x, t: fn(np.asarray(x) + 0.0 * np.asarray(t))


def profile(spec: dict, domain: tuple[float, float]) -> tuple[SpaceFunction, SpaceFunction]:
    """Turns a preset description into a spatial function and its derivative.

    Presets:
        zero: the zero function.
        constant: {"value": v}.
        polynomial: {"coefficients": [a0, a1, ...]} for a0 + a1 x + ...
        eigenmode: {"mode": k, "amplitude": A} for A sin(k pi (x - x_min) / L).
        bump: {"center": x0, "width": w, "amplitude": A} for A (1 - ((x - x0)/w)^2)^2 on |x - x0| < w.

    Raises:
        UnknownPreset: for any other name.
    """
    name = spec.get("preset", "zero")
    x_min, x_max = domain

    if name == "zero":
        return (lambda x: np.zeros(np.shape(x))), (lambda x: np.zeros(np.shape(x)))

    if name == "constant":
        value = float(spec.get("value", 0.0))
        return (lambda x: np.full(np.shape(x), value)), (lambda x: np.zeros(np.shape(x)))

    if name == "polynomial":
        poly = np.polynomial.Polynomial(spec.get("coefficients", [0.0]))
        slope = poly.deriv()
        return (lambda x: poly(np.asarray(x, dtype=float))), (lambda x: slope(np.asarray(x, dtype=float)))

    if name == "eigenmode":
        k = np.pi * int(spec.get("mode", 1)) / (x_max - x_min)
        amplitude = float(spec.get("amplitude", 1.0))
        return (
            lambda x: amplitude * np.sin(k * (np.asarray(x) - x_min)),
            lambda x: amplitude * k * np.cos(k * (np.asarray(x) - x_min)),
        )

    if name == "bump":
        center = float(spec.get("center", 0.5 * (x_min + x_max)))
        width = float(spec.get("width", 0.25 * (x_max - x_min)))
        amplitude = float(spec.get("amplitude", 1.0))

        def bump(x: np.ndarray) -> np.ndarray:
            s = (np.asarray(x) - center) / width
            return amplitude * np.where(np.abs(s) < 1.0, (1.0 - s**2) ** 2, 0.0)

        def bump_slope(x: np.ndarray) -> np.ndarray:
            s = (np.asarray(x) - center) / width
            return amplitude * np.where(np.abs(s) < 1.0, -4.0 * s * (1.0 - s**2) / width, 0.0)

        return bump, bump_slope

    raise UnknownPreset(f"unknown preset '{name}'")


@dataclass(frozen=True, eq=False)
class CoefficientSamples:
    """Coefficients and data sampled at every quadrature point, each of shape (n_cells, nq)."""

    c: np.ndarray
    c_x: np.ndarray
    d: np.ndarray
    f: np.ndarray
    F: np.ndarray


def sample_coefficients(coeffs: Coefficients, quadrature: QuadratureSet) -> CoefficientSamples:
    """Samples the coefficients at the quadrature points of a grid."""

    x, t = quadrature.x, quadrature.t

    def at(values) -> np.ndarray:
        return np.broadcast_to(np.asarray(values, dtype=float), x.shape)

    return CoefficientSamples(
        c=at(coeffs.c(x)),
        c_x=at(coeffs.c_x(x)),
        d=at(coeffs.d(x, t)),
        f=at(coeffs.f(x, t)),
        F=at(coeffs.F(x, t)),
    )
