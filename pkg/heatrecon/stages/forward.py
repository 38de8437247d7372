"""Module for the forward stage: the ground truth on a refinement of the reconstruction grid."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from loguru import logger

from heatrecon.constants import TRUTH_FILE
from heatrecon.enums.spaces import Derivative
from heatrecon.enums.stages import PipelineStage
from heatrecon.forward.coefficients import Coefficients
from heatrecon.forward.energy import EstimateReport, verify_energy_estimate
from heatrecon.forward.field import Field
from heatrecon.forward.solvers import solve_forward, solve_forward_mixed
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import quadrature_points
from heatrecon.settings import ExperimentConfig
from heatrecon.stages.stage import Stage
from heatrecon.storage.utils import write_csv

TRUTH_COLUMNS = ("x", "t", "y", "p")


@dataclass(frozen=True, eq=False)
class Truth:
    """The reference solution.

    Attributes:
        y: the state on the truth grid.
        p: the flux c y_x - F, when the mixed solver computed it.
        coeffs: the coefficients and data it solves.
        energy: the energy estimate of the mixed solution.
    """

    y: Field
    p: Field | None
    coeffs: Coefficients
    energy: EstimateReport | None = None

    @property
    def grid(self) -> SpaceTimeGrid:
        return self.y.space.grid

    def flux(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """p at the given points, from the mixed flux or from c y_x - F."""
        if self.p is not None:
            return self.p.evaluate(x, t)
        return self.coeffs.c(x) * self.y.evaluate(x, t, Derivative.DX) - self.coeffs.F(x, t)


def generate_truth(settings: ExperimentConfig, grid: SpaceTimeGrid) -> Truth:
    """Solves the forward problem on `grid` refined `forward.refinement` times.

    Raises:
        InvalidCoefficients: if the coefficients fail validation on the truth grid.
        SingularStep: if a time step cannot be solved.
        SingularBm: if the mixed flux mass matrix is singular.
    """
    fine = grid.refined(settings.forward.refinement)
    coeffs = settings.coefficients.build(settings.grid.domain)
    coeffs.validate(quadrature_points(fine, settings.grid.quadrature_order))

    if settings.forward.solver == "mixed":
        y, p = solve_forward_mixed(fine, coeffs)
        truth = Truth(y, p, coeffs, verify_energy_estimate(y, p, coeffs))
    else:
        truth = Truth(solve_forward(fine, coeffs, settings.forward.theta), None, coeffs)
    logger.info(f"Truth computed with the {settings.forward.solver} solver on a {fine.nx}x{fine.nt} grid")
    return truth


def save_truth(path: Path, truth: Truth) -> None:
    """Writes (x, t, y, p) at every node of the truth grid."""

    x, t = truth.grid.node_coordinates
    write_csv(path, TRUTH_COLUMNS, np.column_stack([x, t, truth.y.evaluate(x, t), truth.flux(x, t)]))


class Forward(Stage):
    """Builds the reconstruction grid and computes the ground truth."""

    def __init__(self, settings: ExperimentConfig) -> None:
        super().__init__(settings)
        self.next_stage = PipelineStage.OBSERVE

    def update(self) -> None:
        grid = self.settings.grid.build()
        quadrature = self.settings.grid.quadrature(grid)
        truth = generate_truth(self.settings, grid)
        save_truth(self.settings.output.directory / TRUTH_FILE, truth)

        self.context.set_data(grid=grid, quadrature=quadrature, coeffs=truth.coeffs, truth=truth)
        self.context.add_report(nx=grid.nx, nt=grid.nt, truth_nx=truth.grid.nx, truth_nt=truth.grid.nt)
        if truth.energy is not None:
            self.context.add_report(
                energy_lhs=truth.energy.lhs, energy_rhs=truth.energy.rhs, energy_ratio=truth.energy.ratio
            )
        self.done = True
