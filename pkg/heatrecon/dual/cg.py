"""Module for the conjugate-gradient minimization of the dual functional.

With y0 solving A_r y0 = l1, the multiplier minimizes

    J**(lambda) = 1/2 <(B A_r^{-1} B^T + C) lambda, lambda> - <B y0 - l2, lambda>,

and the state is recovered from y = A_r^{-1}(l1 - B^T lambda).
"""

from __future__ import annotations

import time

import numpy as np
from loguru import logger
from scipy.sparse.linalg import cg

from heatrecon.dual.operator import DualOperator
from heatrecon.errors import MaxIterationsExceeded, SolverError
from heatrecon.secondorder.system import ReconstructionReport, build_report


def dual_functional(op: DualOperator, lam: np.ndarray, g: np.ndarray) -> float:
    return float(0.5 * lam @ op.schur(lam) - g @ lam)


def minimize_dual(
    op: DualOperator, tol: float = 1e-10, maxit: int | None = None, x0: np.ndarray | None = None
) -> ReconstructionReport:
    """Minimizes the dual functional by conjugate gradients preconditioned with the multiplier mass matrix.

    Args:
        op: the dual operator of an assembled system.
        tol: relative residual at which CG stops.
        maxit: iteration limit, by default four times the multiplier dimension.
        x0: starting multiplier, zero by default.

    Returns:
        The report of the recovered (y, lambda), with `history` holding one row per iteration.

    Raises:
        MaxIterationsExceeded: if CG does not reach `tol`; the exception carries the report of the last iterate.
    """
    system = op.system
    maxit = 4 * op.n if not maxit else maxit
    start = time.perf_counter()

    l1 = system.primal_rhs()
    y0 = op.A_factor.solve(l1)
    g = op.B @ y0 - system.l2
    g_norm = float(np.linalg.norm(g))

    history = []

    def record(lam: np.ndarray) -> None:
        residual = np.linalg.norm(g - op.schur(lam)) / g_norm if g_norm > 0 else 0.0
        history.append((len(history) + 1, dual_functional(op, lam, g), residual))
        logger.debug(f"CG iteration {len(history)}: J**={history[-1][1]:.12g}, residual {residual:.3e}")

    lam, info = cg(
        op.schur_operator(), g, x0=x0, rtol=tol, atol=0.0, maxiter=maxit, M=op.preconditioner(), callback=record
    )
    if info < 0:
        raise SolverError(f"conjugate gradients broke down (info={info})")

    y = op.A_factor.solve(l1 - op.B.T @ lam)
    residual = float(np.linalg.norm(g - op.schur(lam)) / g_norm) if g_norm > 0 else 0.0
    stats = {
        "unknowns": system.n_primal + op.n,
        "method": "dual",
        "iterations": len(history),
        "residual": residual,
        "dual_functional": dual_functional(op, lam, g),
        "runtime": time.perf_counter() - start,
    }
    report = build_report(system, y, lam, stats)
    report.history = np.array(history, dtype=float).reshape(-1, 3)

    if info > 0:
        logger.error(f"CG stopped after {maxit} iterations at relative residual {residual:.3e}")
        message = f"CG did not reach {tol:.1e} in {maxit} iterations (residual {residual:.3e})"
        raise MaxIterationsExceeded(message, report)
    logger.info(
        f"Dual CG on {system.formulation.value}: {len(history)} iterations, residual {residual:.1e}, "
        f"misfit {report.misfit:.3e}"
    )
    return report
