"""Module for the direct solution of saddle-point systems and the renormalization of the primal unknowns."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sps
from loguru import logger

from heatrecon.config import get_cfg
from heatrecon.enums.spaces import Derivative
from heatrecon.enums.weights import Member
from heatrecon.errors import FactorizationFailure
from heatrecon.grid.assembly import assemble_linear
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.grid.spaces import FemSpace, quadrature_tables
from heatrecon.linalg.factorization import (
    RESIDUAL_TOLERANCE,
    LinearSolver,
    check_residual,
    factorize,
    ruiz_scaling,
)
from heatrecon.linalg.spectra import condition_estimate
from heatrecon.secondorder.system import ReconstructionReport, SaddleSystem, build_report
from heatrecon.weights.family import WeightFamily


@dataclass(frozen=True)
class SolveOptions:
    """Options of the direct solver.

    Attributes:
        renormalize: solve for rho0^{-1} y instead of y.
        dense_limit: largest system factorized densely.
        tolerance: accepted relative residual.
        min_penalty: smallest penalty used by the retry ladder.
        max_retries: retries after a failed factorization.
        equilibration_sweeps: Ruiz sweeps before factorization.
    """

    renormalize: bool = False
    dense_limit: int = 1500
    tolerance: float = RESIDUAL_TOLERANCE
    min_penalty: float = 1e-4
    max_retries: int = 3
    equilibration_sweeps: int = 8

    @classmethod
    def load(cls) -> SolveOptions:
        """Reads the options from the `solver` configuration block."""

        return cls(
            renormalize=bool(get_cfg("solver", "renormalize")),
            dense_limit=int(get_cfg("solver", "dense_limit")),
            min_penalty=float(get_cfg("solver", "min_penalty")),
            max_retries=int(get_cfg("solver", "max_retries")),
            equilibration_sweeps=int(get_cfg("solver", "equilibration_sweeps")),
        )


@dataclass(frozen=True, eq=False)
class Renormalization:
    """The change of unknowns y = s * y~, with s = rho0 averaged over the support of each primal DOF.

    Multiplier unknowns are left unchanged.

    Attributes:
        scaling: s for every unknown of the system, primal first.
        condition_before: condition estimate of the primal block.
        condition_after: condition estimate of the scaled primal block.
    """

    scaling: np.ndarray
    condition_before: float
    condition_after: float

    def apply(self, matrix: sps.spmatrix, rhs: np.ndarray) -> tuple[sps.csr_matrix, np.ndarray]:
        """The scaled system S K S y~ = S b."""
        S = sps.diags(self.scaling)
        return sps.csr_matrix(S @ matrix @ S), self.scaling * rhs

    def back_map(self, solution: np.ndarray) -> np.ndarray:
        """Recovers the original unknowns from the scaled ones."""
        return self.scaling * solution


def support_factors(spaces: tuple[FemSpace, ...], family: WeightFamily, quadrature: QuadratureSet) -> np.ndarray:
    """rho0 averaged over the support of every free DOF of a tuple of spaces.

    s_i = (sum_q w phi_i^2 / sum_q w rho0^{-2} phi_i^2)^{1/2}, so that s_i^2 int rho0^{-2} phi_i^2 = int phi_i^2.
    Unit weights give s_i = 1 exactly.
    """
    inverse_squared = family.at_quadrature(Member.RHO0, quadrature, power=2)
    factors = []
    for space in spaces:
        squares = quadrature_tables(space, quadrature, (Derivative.VALUE,))[Derivative.VALUE] ** 2
        mass = assemble_linear(space, squares, quadrature.w)
        weighted = assemble_linear(space, squares, quadrature.w * inverse_squared)
        mass, weighted = mass[space.free], weighted[space.free]
        factors.append(np.sqrt(np.divide(mass, weighted, out=np.ones_like(mass), where=weighted > 0.0)))
    return np.concatenate(factors) if factors else np.zeros(0)


def apply_renormalization(
    system: SaddleSystem, family: WeightFamily | None = None, dense_limit: int = 1500
) -> Renormalization:
    """Builds the renormalization y~ = rho0^{-1} y of a system.

    Args:
        system: the assembled system.
        family: the weights providing rho0, by default those of the system.
        dense_limit: largest block whose condition number is computed densely.

    Returns:
        The scaling, with condition estimates of the primal block before and after.
    """
    family = system.context.family if family is None else family
    primal = support_factors(system.primal_spaces, family, system.context.quadrature)
    scaling = np.concatenate([primal, np.ones(system.n_multiplier)])

    A = system.primal_block()
    S = sps.diags(primal)
    before = condition_estimate(A, dense_limit)
    after = condition_estimate(sps.csr_matrix(S @ A @ S), dense_limit)
    logger.info(f"Renormalization: condition of the primal block {before:.3e} -> {after:.3e}")
    return Renormalization(scaling, before, after)


def check_inertia(solver: LinearSolver, n_primal: int, n_multiplier: int) -> bool:
    """Compares the inertia of a factorization with the (n_primal, n_multiplier, 0) of a well-posed system.

    A mismatch carried only by pivots below n eps max|pivot| is logged, not raised.

    Raises:
        FactorizationFailure: if more pivots than allowed have a reliable sign of one kind.
    """
    if solver.inertia[:2] == (n_primal, n_multiplier):
        return True
    pivots = solver.pivots
    floor = pivots.size * np.finfo(float).eps * np.max(np.abs(pivots), initial=0.0)
    positive, negative = int(np.sum(pivots > floor)), int(np.sum(pivots < -floor))
    if positive > n_primal or negative > n_multiplier:
        raise FactorizationFailure(
            f"wrong inertia {solver.inertia}, expected ({n_primal}, {n_multiplier}, 0): "
            f"{positive} positive and {negative} negative pivots above {floor:.1e}"
        )
    logger.warning(
        f"Inertia {solver.inertia} differs from ({n_primal}, {n_multiplier}, 0) only in pivots below {floor:.1e}"
    )
    return False


def _direct_solve(system: SaddleSystem, options: SolveOptions, renormalize: bool) -> tuple[np.ndarray, dict]:
    """Equilibrates, factorizes and solves once."""

    K = system.matrix()
    b = system.rhs()
    stats: dict = {"unknowns": K.shape[0], "renormalized": renormalize}
    renormalization = None
    if renormalize:
        renormalization = apply_renormalization(system, dense_limit=options.dense_limit)
        K, b = renormalization.apply(K, b)
        stats["condition_before"] = renormalization.condition_before
        stats["condition_after"] = renormalization.condition_after

    d = ruiz_scaling(K, options.equilibration_sweeps)
    D = sps.diags(d)
    scaled = sps.csr_matrix(D @ K @ D)
    solver = factorize(scaled, options.dense_limit)
    x_scaled = solver.solve(d * b)
    # one step of iterative refinement
    x_scaled = x_scaled + solver.solve(d * b - scaled @ x_scaled)
    x = d * x_scaled
    stats["residual"] = check_residual(K, x, b, options.tolerance, scaling=d)
    stats["factorization"] = type(solver).__name__
    if getattr(solver, "inertia", None) is not None:
        stats["inertia_positive"], stats["inertia_negative"], stats["inertia_zero"] = solver.inertia
        stats["inertia_matches"] = check_inertia(solver, system.n_primal, system.n_multiplier)
    if renormalization is not None:
        x = renormalization.back_map(x)
    return x, stats


def solve_saddle(system: SaddleSystem, options: SolveOptions | None = None) -> ReconstructionReport:
    """Solves an assembled system by direct factorization.

    A failed factorization triggers the retry ladder: first the renormalized unknowns, then penalties
    raised to max(10 r, min_penalty) at every further retry.

    Raises:
        FactorizationFailure: if the last retry fails too.
    """
    options = SolveOptions() if options is None else options
    current, renormalize = system, options.renormalize
    start = time.perf_counter()
    for attempt in range(options.max_retries + 1):
        try:
            x, stats = _direct_solve(current, options, renormalize)
        except FactorizationFailure as e:
            if attempt == options.max_retries:
                logger.error(f"Direct solve failed after {attempt} retries: {e}")
                raise
            if not renormalize:
                logger.warning(f"Direct solve failed ({e}), retrying with renormalized unknowns")
                renormalize = True
            else:
                current = current.with_penalties(lambda r: max(10.0 * r, options.min_penalty))
                penalties = ", ".join(f"{p.name}={p.r:.3g}" for p in current.penalties)
                logger.warning(f"Direct solve failed ({e}), retrying with {penalties}")
            continue

        stats.update(retries=attempt, runtime=time.perf_counter() - start)
        stats.update({f"final_{p.name}": p.r for p in current.penalties})
        primal, multiplier = current.split(x)
        report = build_report(current, primal, multiplier, stats)
        logger.info(
            f"Solved {current.formulation.value}: {stats['unknowns']} unknowns, misfit {report.misfit:.3e}, "
            f"residual {stats['residual']:.1e}"
        )
        return report
    raise AssertionError("unreachable")
