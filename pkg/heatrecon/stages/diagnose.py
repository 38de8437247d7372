"""Module for the diagnostics stage: weighted errors, inf-sup constants, consistency and estimates."""

from __future__ import annotations

import math

import numpy as np
from loguru import logger

from heatrecon.constants import DIAGNOSTICS_FILE
from heatrecon.diagnostics.consistency import mixed_multiplier_consistency, multiplier_consistency
from heatrecon.diagnostics.estimates import alpha_estimate, coincidence_gap, observation_bound
from heatrecon.diagnostics.infsup import estimate_infsup, infsup_constant_mf, infsup_constant_mf4, multiplier_bound
from heatrecon.diagnostics.norms import weighted_errors, weighted_norms
from heatrecon.dual.operator import spectrum
from heatrecon.enums.formulations import Formulation, MultiplierKind
from heatrecon.enums.stages import PipelineStage
from heatrecon.errors import ConfigError
from heatrecon.firstorder.operators import PairField
from heatrecon.forward.coefficients import Coefficients
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.observe.observation import ObservationSet
from heatrecon.secondorder.solve import solve_saddle
from heatrecon.settings import ExperimentConfig
from heatrecon.stages.forward import Truth
from heatrecon.stages.reconstruct import Reconstruction, assemble
from heatrecon.stages.stage import Stage
from heatrecon.storage.utils import write_csv
from heatrecon.weights.domination import check_domination

DIAGNOSTIC_COLUMNS = (
    "nx",
    "nt",
    "h",
    "misfit",
    "cost",
    "observed_ratio",
    "observed_ceiling",
    "error_rho0_y",
    "error_rho1_dy",
    "error_rho1_p",
    "weighted_lhs",
    "energy",
    "C_emp",
    "lambda_norm",
    "delta_h",
    "delta",
    "lambda_bound",
    "consistency",
    "domination_K",
    "theta1",
    "theta2",
    "estimate_lhs",
    "estimate_rhs",
    "coincidence_gap",
    "tr_min",
    "tr_max",
    "tr_bound",
)

# the plain formulation a stabilized one is compared with, on matched spaces
_COUNTERPARTS = {Formulation.MF_ALPHA: Formulation.MF, Formulation.MF4_ALPHA: Formulation.MF4}


def _consistency(
    reconstruction: Reconstruction, obs: ObservationSet, coeffs: Coefficients, quadrature: QuadratureSet
) -> float:
    report, system = reconstruction.report, reconstruction.system
    p = system.parameters
    if system.formulation.is_first_order:
        lam, mu = report.multipliers
        return mixed_multiplier_consistency(
            lam,
            mu,
            PairField(report.y, report.p),
            obs,
            reconstruction.family,
            coeffs,
            r1=p["r1"],
            r2=p["r2"],
            members=report.multiplier_members,
            quadrature=quadrature,
        )
    return multiplier_consistency(
        report.multipliers[0],
        report.y,
        obs,
        reconstruction.family,
        coeffs,
        r=p["r"],
        member=report.multiplier_members[0],
        quadrature=quadrature,
    )


def _continuous_infsup(settings: ExperimentConfig, reconstruction: Reconstruction, quadrature: QuadratureSet) -> float:
    block = settings.formulation
    if reconstruction.system.formulation.is_first_order:
        return infsup_constant_mf4(
            reconstruction.family, quadrature, block.eta1, block.eta2, settings.diagnostics.continuity_constant
        )
    return infsup_constant_mf(reconstruction.family, quadrature, block.eta)


def _stabilization(settings: ExperimentConfig, formulation: Formulation) -> float | None:
    if not formulation.is_stabilized:
        return None
    return settings.formulation.alpha1 if formulation.is_first_order else settings.formulation.alpha


def diagnose(
    settings: ExperimentConfig,
    grid: SpaceTimeGrid,
    quadrature: QuadratureSet,
    obs: ObservationSet,
    truth: Truth,
    reconstruction: Reconstruction,
) -> dict[str, float]:
    """Evaluates every diagnostic of a reconstruction.

    Quantities that do not apply to the formulation or the solver are NaN.

    Returns:
        The values by column of the diagnostics table.
    """
    block = settings.diagnostics
    report, system = reconstruction.report, reconstruction.system
    formulation = system.formulation
    reference = settings.weights.build(settings.grid, settings.observation.omega, reference=True)
    values = dict.fromkeys(DIAGNOSTIC_COLUMNS, math.nan)

    values.update(nx=grid.nx, nt=grid.nt, h=max(grid.hx, grid.ht), misfit=report.misfit, cost=report.cost)
    truth_p = None if truth.p is None or report.p is None else truth.p
    values.update(weighted_errors(report.y, truth.y, reference, quadrature, p=report.p, truth_p=truth_p))
    norms = weighted_norms(report.y, reference, quadrature, p=report.p, energy=report.primal_norm)
    values.update(weighted_lhs=norms.lhs, energy=report.primal_norm)
    if norms.C_emp is not None:
        values["C_emp"] = norms.C_emp
    values["domination_K"] = check_domination(reconstruction.family, reference, grid, quadrature).K

    if formulation is Formulation.QR:
        values["lambda_norm"] = 0.0
        return values

    values["observed_ratio"], values["observed_ceiling"] = observation_bound(
        report, _stabilization(settings, formulation)
    )
    values["lambda_norm"] = report.multiplier_norm
    values["delta_h"] = estimate_infsup(system, block.dense_limit, block.tol, block.maxit)
    values["delta"] = _continuous_infsup(settings, reconstruction, quadrature)
    if values["delta_h"] > 0:
        values["lambda_bound"] = multiplier_bound(values["delta_h"], report.observation_norm)
    values["consistency"] = _consistency(reconstruction, obs, truth.coeffs, quadrature)

    if formulation.is_stabilized:
        try:
            estimate = alpha_estimate(system, report, block.dense_limit, block.tol, block.maxit)
            values.update(
                theta1=estimate.theta1, theta2=estimate.theta2, estimate_lhs=estimate.lhs, estimate_rhs=estimate.rhs
            )
        except ConfigError as e:
            logger.warning(f"Skipping the a-priori estimate: {e}")
        if block.coincidence:
            counterpart = assemble(
                settings,
                grid,
                quadrature,
                obs,
                reconstruction.family,
                truth.coeffs,
                formulation=_COUNTERPARTS[formulation],
                multiplier=MultiplierKind.HERMITE,
            )
            values["coincidence_gap"] = coincidence_gap(report, solve_saddle(counterpart, settings.solver.options))

    if reconstruction.operator is not None:
        values["tr_min"], values["tr_max"] = spectrum(reconstruction.operator, tol=block.tol)
        values["tr_bound"] = reconstruction.operator.bound
    return values


class Diagnose(Stage):
    """Writes the diagnostics table of the reconstruction."""

    def __init__(self, settings: ExperimentConfig) -> None:
        super().__init__(settings)
        self.next_stage = PipelineStage.NONE

    def update(self) -> None:
        data = self.context.data
        values = diagnose(
            self.settings, data["grid"], data["quadrature"], data["obs"], data["truth"], data["reconstruction"]
        )
        row = np.array([values[column] for column in DIAGNOSTIC_COLUMNS], dtype=float)
        write_csv(self.settings.output.directory / DIAGNOSTICS_FILE, DIAGNOSTIC_COLUMNS, row[None, :])

        self.context.set_data(diagnostics=values)
        self.context.add_report(**{key: value for key, value in values.items() if not math.isnan(value)})
        self.done = True
