"""Module for convergence sweeps: the same experiment on nested refinements against one fine truth."""

from __future__ import annotations

import math
import time
from pathlib import Path

import numpy as np
from loguru import logger

from heatrecon.app import Overrides, load_settings, manifest
from heatrecon.constants import MANIFEST_FILE, SWEEP_FILE
from heatrecon.diagnostics.infsup import estimate_infsup
from heatrecon.diagnostics.norms import weighted_errors
from heatrecon.enums.formulations import Formulation
from heatrecon.errors import ConfigError
from heatrecon.settings import ExperimentConfig
from heatrecon.stages.forward import generate_truth
from heatrecon.stages.observe import synthesize
from heatrecon.stages.reconstruct import assemble, solve
from heatrecon.storage.utils import write_csv, write_json

SWEEP_COLUMNS = (
    "level",
    "nx",
    "nt",
    "h",
    "misfit",
    "error_rho0_y",
    "error_rho1_dy",
    "error_rho1_p",
    "lambda_norm",
    "delta_h",
    "runtime",
)


def run_sweep(settings: ExperimentConfig, levels: int | None = None) -> Path:
    """Runs the configured experiment on `levels` nested grids, doubling nx and nt at every level.

    The truth is computed once, on the finest level refined `forward.refinement` times. A row is written
    after every completed level, so a failing level leaves the rows of the earlier ones.

    Args:
        settings: the validated configuration; its grid is the coarsest level.
        levels: number of levels, by default `sweep.levels`.

    Returns:
        The path of the sweep table.

    Raises:
        ConfigError: if fewer than two levels are requested.
        ReconError: from the first failing level.
    """
    levels = settings.levels if levels is None else levels
    if int(levels) != levels or levels < 2:
        raise ConfigError(f"a sweep needs at least 2 levels, got {levels}")

    path = settings.output.directory / SWEEP_FILE
    write_json(settings.output.directory / MANIFEST_FILE, manifest(settings, "sweep"))
    truth = generate_truth(settings, settings.grid.build(levels - 1))
    family = settings.weights.build(settings.grid, settings.observation.omega)
    reference = settings.weights.build(settings.grid, settings.observation.omega, reference=True)
    block = settings.diagnostics
    rows = []
    for level in range(levels):
        start = time.perf_counter()
        grid = settings.grid.build(level)
        quadrature = settings.grid.quadrature(grid)
        logger.info(f"Sweep level {level + 1}/{levels}: {grid.nx}x{grid.nt}")
        try:
            obs = synthesize(settings, truth, grid, quadrature)
            reconstruction = solve(settings, assemble(settings, grid, quadrature, obs, family, truth.coeffs))
            report = reconstruction.report
            errors = weighted_errors(report.y, truth.y, reference, quadrature, p=report.p, truth_p=truth.p)
            delta_h = math.nan
            if report.formulation is not Formulation.QR:
                delta_h = estimate_infsup(reconstruction.system, block.dense_limit, block.tol, block.maxit)
        except Exception:
            logger.error(f"Sweep level {level + 1} failed, {len(rows)} completed levels kept in {path}")
            raise
        rows.append(
            [
                level + 1,
                grid.nx,
                grid.nt,
                max(grid.hx, grid.ht),
                report.misfit,
                errors["error_rho0_y"],
                errors["error_rho1_dy"],
                errors.get("error_rho1_p", math.nan),
                report.multiplier_norm,
                delta_h,
                time.perf_counter() - start,
            ]
        )
        write_csv(path, SWEEP_COLUMNS, np.array(rows, dtype=float))
    logger.info(f"Sweep of {levels} levels written to {path}")
    return path


def convergence_sweep(
    config_path: Path | str | None = None, levels: int | None = None, overrides: Overrides | None = None
) -> Path:
    """Loads a configuration and runs its convergence sweep."""

    settings = load_settings(config_path, overrides)
    return run_sweep(settings, levels)

