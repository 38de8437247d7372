"""Module for the weighted global norms of a reconstruction and the empirical stability constant.

For the second-order formulations the constant compares ||rho_0^{-1} y||_{L2(Q_T)} with ||y||_Y; for the
first-order ones, ||rho_0^{-1} y|| + ||rho_1^{-1} p|| with ||(y, p)||_U. The weights are the raw,
uncapped members of a Carleman family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from loguru import logger

from heatrecon.constants import RATIO_FLOOR
from heatrecon.enums.spaces import Derivative
from heatrecon.enums.weights import Member
from heatrecon.forward.field import Field
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.secondorder.system import SaddleSystem
from heatrecon.weights.family import WeightFamily


@dataclass
class NormReport:
    """Labeled norms and the empirical constant C_emp = lhs / rhs.

    Attributes:
        values: norms by label.
        lhs: the global weighted side of the stability estimate.
        rhs: the energy norm, if known.
    """

    values: dict[str, float] = field(default_factory=dict)
    lhs: float = 0.0
    rhs: float | None = None

    @property
    def C_emp(self) -> float | None:
        if self.rhs is None or self.rhs <= RATIO_FLOOR:
            return None
        return self.lhs / self.rhs

    def as_dict(self) -> dict[str, float]:
        entries = dict(self.values)
        entries["lhs"] = self.lhs
        if self.rhs is not None:
            entries["rhs"] = self.rhs
        if self.C_emp is not None:
            entries["C_emp"] = self.C_emp
        return entries


def _samples(f: Field, quadrature: QuadratureSet, derivative: Derivative) -> np.ndarray:
    if f.space.grid.same_layout(quadrature.grid):
        return f.at_quadrature(quadrature, derivative)
    return f.evaluate(quadrature.x, quadrature.t, derivative)


def _norm(values: np.ndarray, quadrature: QuadratureSet, cells: np.ndarray | None) -> float:
    if cells is not None:
        values = values[cells]
    return math.sqrt(quadrature.integrate(values**2, cells))


def energy_norms(system: SaddleSystem, primal: np.ndarray) -> dict[str, float]:
    """Components of the primal norm of a solution: the observation term, each operator term, the total."""

    components = {"observation": math.sqrt(max(float(primal @ (system.obs_gram @ primal)), 0.0))}
    for penalty in system.penalties:
        components[f"operator_{penalty.name}"] = math.sqrt(max(float(primal @ (penalty.matrix @ primal)), 0.0))
    components["total"] = math.sqrt(max(float(primal @ (system.primal_gram @ primal)), 0.0))
    return components


def weighted_norms(
    y: Field,
    carleman: WeightFamily,
    quadrature: QuadratureSet,
    p: Field | None = None,
    energy: float | None = None,
    cells: np.ndarray | None = None,
) -> NormReport:
    """Evaluates the global weighted norms of y (and p) by quadrature.

    Args:
        y: the state.
        carleman: the family whose uncapped rho_0 and rho_1 members weight the norms.
        quadrature: the points; fields on another grid are evaluated pointwise.
        p: the flux, for the first-order formulations.
        energy: ||y||_Y or ||(y, p)||_U, the right-hand side of the estimate.
        cells: restricts every norm to these cells.

    Returns:
        The norms, labeled `rho0_y`, `rho1_dy` and, with a flux, `rho1_p`.
    """
    family = carleman.uncapped()
    rho0_inv = family.at_quadrature(Member.RHO0, quadrature)
    rho1_inv = family.at_quadrature(Member.RHO1, quadrature)

    report = NormReport(rhs=energy)
    report.values["rho0_y"] = _norm(rho0_inv * _samples(y, quadrature, Derivative.VALUE), quadrature, cells)
    report.values["rho1_dy"] = _norm(rho1_inv * _samples(y, quadrature, Derivative.DX), quadrature, cells)
    report.lhs = report.values["rho0_y"]
    if p is not None:
        report.values["rho1_p"] = _norm(rho1_inv * _samples(p, quadrature, Derivative.VALUE), quadrature, cells)
        report.lhs += report.values["rho1_p"]

    logger.debug(f"Weighted norms ({carleman.kind.value}): {report.values}, C_emp={report.C_emp}")
    return report


def weighted_errors(
    y: Field,
    truth: Field,
    carleman: WeightFamily,
    quadrature: QuadratureSet,
    p: Field | None = None,
    truth_p: Field | None = None,
) -> dict[str, float]:
    """Weighted norms of the reconstruction error, with the same labels as `weighted_norms` prefixed by `error_`.

    The truth usually lives on a finer grid and is evaluated at the points of `quadrature`.
    """
    family = carleman.uncapped()
    rho0_inv = family.at_quadrature(Member.RHO0, quadrature)
    rho1_inv = family.at_quadrature(Member.RHO1, quadrature)

    def difference(a: Field, b: Field, derivative: Derivative) -> np.ndarray:
        return _samples(a, quadrature, derivative) - _samples(b, quadrature, derivative)

    errors = {
        "error_rho0_y": _norm(rho0_inv * difference(y, truth, Derivative.VALUE), quadrature, None),
        "error_rho1_dy": _norm(rho1_inv * difference(y, truth, Derivative.DX), quadrature, None),
    }
    if p is not None and truth_p is not None:
        errors["error_rho1_p"] = _norm(rho1_inv * difference(p, truth_p, Derivative.VALUE), quadrature, None)
    logger.debug(f"Weighted errors ({carleman.kind.value}): {errors}")
    return errors
