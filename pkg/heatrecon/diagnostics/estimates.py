"""Module for the a-priori estimates of the stabilized formulations and related certificates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from loguru import logger

from heatrecon.enums.formulations import Formulation
from heatrecon.errors import ConfigError
from heatrecon.linalg.spectra import min_generalized_eigenvalue
from heatrecon.secondorder.system import ReconstructionReport, SaddleSystem


@dataclass(frozen=True)
class AlphaEstimate:
    """Both sides of theta1 ||y||^2 + theta2 ||lambda||^2 <= ((1 - alpha)^2 / theta1 + alpha^2 / theta2) N^2.

    Attributes:
        theta1: coercivity constant of the primal block.
        theta2: coercivity constant of the stabilization block, measured.
        lhs: left side, with the primal and multiplier-space norms of the solution.
        rhs: right side, with N = ||rho_0^{-1} y_obs||.
    """

    theta1: float
    theta2: float
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-8)


def theta1(alpha: float, r: float, eta: float) -> float:
    return min(1.0 - alpha, r / eta)


def theta1_mixed(alpha1: float, r1: float, r2: float, eta1: float, eta2: float) -> float:
    return min(1.0 - alpha1, r1 / eta1, r2 / eta2)


def theta2(system: SaddleSystem, dense_limit: int = 500, tol: float = 1e-10, maxit: int = 200) -> float:
    """Smallest eigenvalue of C with respect to the Gram matrix of the multiplier norm.

    Raises:
        ConfigError: if the system has no stabilization block.
    """
    if system.C is None:
        raise ConfigError(f"{system.formulation.value} has no stabilization block")
    return min_generalized_eigenvalue(system.C, system.multiplier_gram, dense_limit, tol, maxit)


def _stabilization_parameter(system: SaddleSystem) -> float:
    return system.parameters["alpha1" if system.formulation.is_first_order else "alpha"]


def alpha_estimate(
    system: SaddleSystem, report: ReconstructionReport, dense_limit: int = 500, tol: float = 1e-10, maxit: int = 200
) -> AlphaEstimate:
    """Evaluates the a-priori estimate of a stabilized formulation for its solution.

    The estimate holds for f = 0 (and F = 0).

    Raises:
        ConfigError: for a formulation without a stabilization block.
    """
    if not system.formulation.is_stabilized:
        raise ConfigError(f"{system.formulation.value} has no a-priori estimate")
    p = system.parameters
    alpha = _stabilization_parameter(system)
    if system.formulation.is_first_order:
        t1 = theta1_mixed(alpha, p["r1"], p["r2"], p["eta1"], p["eta2"])
    else:
        t1 = theta1(alpha, p["r"], p["eta"])
    t2 = theta2(system, dense_limit, tol, maxit)
    if not (t1 > 0 and t2 > 0):
        raise ConfigError(f"the estimate needs positive coercivity constants, got theta1={t1}, theta2={t2}")
    lhs = t1 * report.primal_norm**2 + t2 * report.multiplier_space_norm**2
    rhs = ((1.0 - alpha) ** 2 / t1 + alpha**2 / t2) * report.observation_norm**2
    estimate = AlphaEstimate(t1, t2, lhs, rhs)
    logger.info(f"A-priori estimate: theta1={t1:.4g}, theta2={t2:.4g}, {lhs:.6g} <= {rhs:.6g}: {estimate.passed}")
    return estimate


def observation_ceiling(formulation: Formulation, alpha: float | None = None) -> float:
    """Factor c with ||rho_0^{-1} y_h||_{q_T} <= c ||rho_0^{-1} y_obs||_{q_T} for a solution y_h.

    1 for the plain formulations and 1/2 (1 + (1 - alpha)^{-1/2}) for the stabilized ones.
    """
    if not formulation.is_stabilized:
        return 1.0
    if alpha is None:
        raise ConfigError(f"{formulation.value} needs its stabilization parameter")
    return 0.5 * (1.0 + (1.0 - alpha) ** -0.5)


def observation_bound(report: ReconstructionReport, alpha: float | None = None) -> tuple[float, float]:
    """The ratio ||rho_0^{-1} y_h|| / ||rho_0^{-1} y_obs|| and its ceiling; a zero observation gives ratio 0."""

    ceiling = observation_ceiling(report.formulation, alpha)
    ratio = report.observed_norm / report.observation_norm if report.observation_norm > 0 else 0.0
    return ratio, ceiling


def coincidence_gap(report: ReconstructionReport, reference: ReconstructionReport) -> float:
    """Relative difference of the primal vectors of two reconstructions on the same spaces."""

    if report.primal.shape != reference.primal.shape:
        raise ConfigError("reconstructions on different spaces cannot be compared")
    scale = float(np.linalg.norm(reference.primal))
    gap = float(np.linalg.norm(report.primal - reference.primal))
    value = gap / scale if scale > 0 else gap
    logger.info(f"Coincidence gap {report.formulation.value} / {reference.formulation.value}: {value:.3e}")
    return value
