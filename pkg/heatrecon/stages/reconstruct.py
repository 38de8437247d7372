"""Module for the reconstruction stage: assembly and solve of the selected formulation."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from loguru import logger

from heatrecon.constants import ITERATIONS_FILE, RECONSTRUCTION_FILE
from heatrecon.dual.cg import minimize_dual
from heatrecon.dual.operator import DualOperator
from heatrecon.enums.formulations import Formulation, MultiplierKind, SolverMethod
from heatrecon.enums.stages import PipelineStage
from heatrecon.enums.weights import Member
from heatrecon.errors import MaxIterationsExceeded
from heatrecon.firstorder.formulations import assemble_mf4, assemble_mf4_alpha
from heatrecon.firstorder.operators import pair_spaces
from heatrecon.forward.coefficients import Coefficients
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.observe.observation import ObservationSet
from heatrecon.secondorder.formulations import assemble_mf, assemble_mf_alpha, hermite_primal_space
from heatrecon.secondorder.quasi_reversibility import assemble_qr, solve_qr
from heatrecon.secondorder.solve import solve_saddle
from heatrecon.secondorder.system import ReconstructionReport, SaddleSystem
from heatrecon.settings import ExperimentConfig
from heatrecon.stages.stage import Stage
from heatrecon.storage.utils import write_csv
from heatrecon.weights.family import WeightFamily

ITERATION_COLUMNS = ("iteration", "dual_functional", "residual")

_MULTIPLIER_NAMES = {None: ("lambda", "mu"), Member.RHO: ("phi", "phi"), Member.RHO1: ("sigma", "sigma")}


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """A solved system.

    Attributes:
        system: the assembled system.
        report: its solution.
        family: the weights it was assembled with.
        operator: the dual operator, when the dual method was used.
    """

    system: SaddleSystem
    report: ReconstructionReport
    family: WeightFamily
    operator: DualOperator | None = None


def assemble(
    settings: ExperimentConfig,
    grid: SpaceTimeGrid,
    quadrature: QuadratureSet,
    obs: ObservationSet,
    family: WeightFamily,
    coeffs: Coefficients,
    formulation: Formulation | None = None,
    multiplier: MultiplierKind | None = None,
) -> SaddleSystem:
    """Assembles a formulation with the parameters of the `formulation` block.

    Args:
        formulation: overrides the configured formulation.
        multiplier: overrides the configured multiplier space of mf.
    """
    block = settings.formulation
    formulation = block.name if formulation is None else formulation
    match formulation:
        case Formulation.MF:
            return assemble_mf(
                hermite_primal_space(grid),
                block.multiplier if multiplier is None else multiplier,
                family,
                obs,
                coeffs,
                r=block.r,
                eta=block.eta,
                quadrature=quadrature,
            )
        case Formulation.MF_ALPHA:
            return assemble_mf_alpha(
                hermite_primal_space(grid), family, obs, coeffs, block.r, block.alpha, block.eta, quadrature
            )
        case Formulation.MF4:
            return assemble_mf4(
                pair_spaces(grid),
                family,
                obs,
                coeffs,
                r1=block.r1,
                r2=block.r2,
                eta1=block.eta1,
                eta2=block.eta2,
                jump=block.jump,
                quadrature=quadrature,
            )
        case Formulation.MF4_ALPHA:
            return assemble_mf4_alpha(
                pair_spaces(grid),
                family,
                obs,
                coeffs,
                r1=block.r1,
                r2=block.r2,
                alpha1=block.alpha1,
                alpha2=block.alpha2,
                eta1=block.eta1,
                eta2=block.eta2,
                quadrature=quadrature,
            )
        case Formulation.QR:
            return assemble_qr(
                hermite_primal_space(grid),
                family,
                obs,
                coeffs,
                eps=block.eps,
                eta=block.eta,
                unit_weights=block.unit_qr_weights,
                quadrature=quadrature,
            )


def solve(settings: ExperimentConfig, system: SaddleSystem) -> Reconstruction:
    """Solves a system with the configured method.

    Raises:
        SolverError: if the solve fails; MaxIterationsExceeded carries the report of the last iterate.
    """
    block = settings.solver
    if system.formulation is Formulation.QR:
        return Reconstruction(system, solve_qr(system, block.options), system.context.family)
    if block.method is SolverMethod.DUAL:
        operator = DualOperator(system, dense_limit=block.options.dense_limit)
        report = minimize_dual(operator, tol=block.tol, maxit=block.maxit or None)
        return Reconstruction(system, report, system.context.family, operator)
    return Reconstruction(system, solve_saddle(system, block.options), system.context.family)


def reconstruction_columns(report: ReconstructionReport) -> tuple[str, ...]:
    """Column names of the reconstruction table.

    A multiplier stored as the physical lambda is named `lambda` (`mu` for the flux multiplier); one
    stored through the change of unknowns lambda = rho * phi is named after the unknown, `phi` or `sigma`.
    """
    columns = ["x", "t", "y"]
    if report.p is not None:
        columns.append("p")
    for k, member in enumerate(report.multiplier_members):
        columns.append(_MULTIPLIER_NAMES[member][k])
    return tuple(columns)


def save_reconstruction(path: Path, report: ReconstructionReport) -> None:
    """Writes the reconstructed fields at the cell centers of the reconstruction grid."""

    corners = report.y.space.grid.cells
    x = 0.5 * (corners[:, 0] + corners[:, 1])
    t = 0.5 * (corners[:, 2] + corners[:, 3])
    columns = [x, t, report.y.evaluate(x, t)]
    if report.p is not None:
        columns.append(report.p.evaluate(x, t))
    columns.extend(multiplier.evaluate(x, t) for multiplier in report.multipliers)
    write_csv(path, reconstruction_columns(report), np.column_stack(columns))


def save_iterations(path: Path, report: ReconstructionReport) -> None:
    """Writes the CG history (iteration, dual functional, relative residual)."""
    write_csv(path, ITERATION_COLUMNS, report.history)


class Reconstruct(Stage):
    """Assembles and solves the configured formulation."""

    def __init__(self, settings: ExperimentConfig) -> None:
        super().__init__(settings)
        self.next_stage = PipelineStage.DIAGNOSE

    def update(self) -> None:
        data = self.context.data
        directory = self.settings.output.directory
        family = self.settings.weights.build(self.settings.grid, self.settings.observation.omega)
        system = assemble(self.settings, data["grid"], data["quadrature"], data["obs"], family, data["coeffs"])
        try:
            reconstruction = solve(self.settings, system)
        except MaxIterationsExceeded as e:
            if e.report is not None:
                logger.warning(f"Keeping the CG history of the last iterate in {ITERATIONS_FILE}")
                save_iterations(directory / ITERATIONS_FILE, e.report)
            raise

        report = reconstruction.report
        save_reconstruction(directory / RECONSTRUCTION_FILE, report)
        if report.history is not None:
            save_iterations(directory / ITERATIONS_FILE, report)

        self.context.set_data(reconstruction=reconstruction)
        entries = {"method": self.settings.solver.method.value}
        entries.update(report.as_dict())
        self.context.add_report(**entries)
        self.done = True
