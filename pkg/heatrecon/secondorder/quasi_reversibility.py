"""Module for the quasi-reversibility baseline.

The regularized least-squares problem min ||P y - (f, y_obs)||^2 + eps ||y||_Y^2 with
P y = (rho^{-1} L y, rho0^{-1} y on q_T) is kept in the `SaddleSystem` container without multipliers.
"""

from __future__ import annotations

import time

import numpy as np
import scipy.sparse as sps
from loguru import logger

from heatrecon.enums.formulations import Formulation
from heatrecon.enums.weights import WeightKind
from heatrecon.errors import NonPositiveEps
from heatrecon.forward.coefficients import Coefficients
from heatrecon.grid.assembly import mirror
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.grid.spaces import FemSpace
from heatrecon.linalg.factorization import SolverCholesky, check_residual, ruiz_scaling
from heatrecon.linalg.spectra import min_generalized_eigenvalue
from heatrecon.observe.observation import ObservationSet
from heatrecon.secondorder.formulations import check_penalty, equation_penalty, make_context
from heatrecon.secondorder.solve import SolveOptions
from heatrecon.secondorder.system import ReconstructionReport, SaddleSystem, build_report
from heatrecon.weights.family import WeightFamily


def assemble_qr(
    primal_space: FemSpace,
    family: WeightFamily,
    obs: ObservationSet,
    coeffs: Coefficients,
    eps: float,
    eta: float = 1.0,
    unit_weights: bool = False,
    quadrature: QuadratureSet | None = None,
) -> SaddleSystem:
    """Assembles <P y, P y'> + eps <y, y'>_Y = <(f, y_obs), P y'>.

    Args:
        primal_space: a Hermite space.
        family: the weights of P and of the Y norm.
        obs: the observation.
        coeffs: coefficients and sources.
        eps: Tikhonov parameter, > 0.
        eta: weight of the equation term in the Y norm.
        unit_weights: use unit weights everywhere.
        quadrature: assembly quadrature.

    Raises:
        NonPositiveEps: if eps <= 0.
    """
    if not eps > 0:
        raise NonPositiveEps(f"eps must be positive, got {eps}")
    check_penalty("eta", eta, strict=True)
    if unit_weights:
        family = WeightFamily(WeightKind.UNIT, rho_star=1.0, log_cap=0.0, T=family.T)
    context = make_context(family, obs, coeffs, quadrature)
    L = context.operator(primal_space)
    obs_gram, obs_rhs = context.observation_block(primal_space)
    penalty = equation_penalty(context, primal_space, L, 1.0)
    gram = mirror(obs_gram + eta * penalty.matrix)
    n = primal_space.n_free
    logger.debug(f"Assembled qr: {n} unknowns, eps={eps}, unit weights: {unit_weights}")
    return SaddleSystem(
        formulation=Formulation.QR,
        context=context,
        primal_spaces=(primal_space,),
        multiplier_spaces=(),
        multiplier_members=(),
        obs_gram=obs_gram,
        obs_rhs=obs_rhs,
        obs_scale=1.0,
        penalties=(penalty,),
        B=sps.csr_matrix((0, n)),
        C=None,
        l2=np.zeros(0),
        primal_gram=gram,
        multiplier_gram=sps.csr_matrix((0, 0)),
        multiplier_l2_gram=sps.csr_matrix((0, 0)),
        shift=eps * gram,
        parameters={"eps": eps, "eta": eta, "unit_weights": unit_weights, "weights": family.kind.value},
    )


def solve_qr(system: SaddleSystem, options: SolveOptions | None = None, certify: bool = True) -> ReconstructionReport:
    """Solves the quasi-reversibility system by Cholesky factorization.

    Args:
        system: a system from `assemble_qr`.
        options: solver options.
        certify: also compute the smallest eigenvalue of the equilibrated matrix (stat `min_eigenvalue`), whose
            sign is that of the smallest eigenvalue of the matrix.
    """
    options = SolveOptions() if options is None else options
    start = time.perf_counter()
    K = system.matrix()
    b = system.rhs()
    d = ruiz_scaling(K, options.equilibration_sweeps)
    scaled = sps.csr_matrix(sps.diags(d) @ K @ sps.diags(d))
    solver = SolverCholesky(scaled, dense_limit=options.dense_limit)
    y_scaled = solver.solve(d * b)
    y_scaled = y_scaled + solver.solve(d * b - scaled @ y_scaled)
    y = d * y_scaled
    stats = {
        "unknowns": K.shape[0],
        "residual": check_residual(K, y, b, options.tolerance, scaling=d),
        "shift": solver.shift,
        "runtime": time.perf_counter() - start,
    }
    if certify:
        stats["min_eigenvalue"] = min_generalized_eigenvalue(
            scaled, sps.identity(K.shape[0], format="csr"), dense_limit=options.dense_limit
        )
    report = build_report(system, y, np.zeros(0), stats)
    logger.info(f"Solved qr (eps={system.parameters['eps']}): misfit {report.misfit:.3e}")
    return report
