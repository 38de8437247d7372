"""Module for the empirical check of the energy estimate of the first-order system."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from loguru import logger
from scipy.sparse.linalg import splu

from heatrecon.constants import DEFAULT_ORDER
from heatrecon.enums.spaces import BasisKind, Derivative
from heatrecon.errors import UnsupportedSpace
from heatrecon.forward.coefficients import Coefficients
from heatrecon.forward.field import Field
from heatrecon.forward.spatial import SpatialDiscretization
from heatrecon.grid.quadrature import quadrature_points


@dataclass(frozen=True)
class EstimateReport:
    """Both sides of ||y'||_{L2(H^-1)} + ||y||_{L2(H^1_0)} + ||p|| <= C (||y0|| + ||f|| + ||F||).

    The H^-1 norm is the discrete surrogate v -> sqrt((M_L v)^T K^{-1} (M_L v)) with M_L the lumped
    mass and K the P1 Laplacian.

    Attributes:
        dual_norm: ||y'||_{L2(0,T;H^-1)} surrogate.
        energy_norm: ||y||_{L2(0,T;H^1_0)}.
        flux_norm: ||p||_{L2(Q_T)}.
        initial_norm: ||y0||_{L2(Omega)}.
        source_norm: ||f||_{L2(Q_T)}.
        flux_source_norm: ||F||_{L2(Q_T)}.
    """

    dual_norm: float
    energy_norm: float
    flux_norm: float
    initial_norm: float
    source_norm: float
    flux_source_norm: float

    @property
    def lhs(self) -> float:
        return self.dual_norm + self.energy_norm + self.flux_norm

    @property
    def rhs(self) -> float:
        return self.initial_norm + self.source_norm + self.flux_source_norm

    @property
    def ratio(self) -> float:
        """The empirical constant C_emp; zero data give 0."""
        return self.lhs / self.rhs if self.rhs > 0 else 0.0

    @property
    def passed(self) -> bool:
        return math.isfinite(self.ratio)


def verify_energy_estimate(y: Field, p: Field, coeffs: Coefficients) -> EstimateReport:
    """Evaluates both sides of the energy estimate for a mixed forward solution.

    Args:
        y: state on the space-time Q1 space, as returned by `solve_forward_mixed`.
        p: flux on the space-time P0 space.
        coeffs: the coefficients and data used to compute them.

    Raises:
        UnsupportedSpace: if y is not a Q1 field.
    """
    if y.space.kind is not BasisKind.BILINEAR_Q1:
        raise UnsupportedSpace("the energy estimate expects a Q1 state")

    grid = y.space.grid
    quadrature = quadrature_points(grid, DEFAULT_ORDER)
    spatial = SpatialDiscretization(grid, coeffs, DEFAULT_ORDER)

    levels = y.values.reshape(grid.nt + 1, grid.nx + 1)[:, 1:-1]
    dual_sq = 0.0
    if spatial.n_interior > 0:
        riesz = splu(spatial.laplacian.tocsc())
        for rate in np.diff(levels, axis=0) / grid.ht:
            moment = spatial.lumped_mass * rate
            dual_sq += grid.ht * float(moment @ riesz.solve(moment))

    report = EstimateReport(
        dual_norm=math.sqrt(dual_sq),
        energy_norm=y.norm(quadrature, derivative=Derivative.DX),
        flux_norm=p.norm(quadrature),
        initial_norm=spatial.norm(coeffs.y0),
        source_norm=math.sqrt(quadrature.integrate(coeffs.f(quadrature.x, quadrature.t) ** 2)),
        flux_source_norm=math.sqrt(quadrature.integrate(coeffs.F(quadrature.x, quadrature.t) ** 2)),
    )
    logger.info(f"Energy estimate: lhs={report.lhs:.6g}, rhs={report.rhs:.6g}, C_emp={report.ratio:.6g}")
    return report
