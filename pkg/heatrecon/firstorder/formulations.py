"""Module for the assembly of the first-order mixed formulations on the pair (y, p).

Both formulations take y and p bilinear and reuse the `SaddleSystem` container and its direct and
dual solvers. The constraints are I(y, p) = f and J(y, p) = F.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sps
from loguru import logger

from heatrecon.enums.formulations import Formulation
from heatrecon.enums.spaces import BasisKind, Derivative
from heatrecon.enums.weights import Member
from heatrecon.firstorder.operators import (
    Pair,
    cell_jump_gram,
    equation_tables,
    flux_tables,
    multiplier_pair_spaces,
    pair_coupling,
    pair_gram,
    pair_load,
)
from heatrecon.forward.coefficients import Coefficients
from heatrecon.grid.assembly import mirror
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.grid.spaces import make_space
from heatrecon.observe.observation import ObservationSet
from heatrecon.secondorder.forms import FormContext
from heatrecon.secondorder.formulations import check_alpha, check_penalty, make_context
from heatrecon.secondorder.system import Penalty, SaddleSystem
from heatrecon.weights.family import WeightFamily


def _observation_block(context: FormContext, spaces: Pair) -> tuple[sps.csr_matrix, np.ndarray]:
    """The observation term acts on y only."""

    gram, rhs = context.observation_block(spaces[0])
    n_p = spaces[1].n_free
    return sps.block_diag([gram, sps.csr_matrix((n_p, n_p))], format="csr"), np.concatenate([rhs, np.zeros(n_p)])


def _penalties(context: FormContext, spaces: Pair, r1: float, r2: float) -> tuple[Penalty, Penalty]:
    """r1 * ||rho1^{-1}(J - F)||^2 and r2 * ||rho^{-1}(I - f)||^2."""

    s = context.samples
    quadrature = context.quadrature
    flux_weight = context.rho1_inv**2
    equation_weight = context.rho_inv**2
    flux = flux_tables(context, spaces)
    equation = equation_tables(context, spaces)
    return (
        Penalty(
            name="r1",
            r=r1,
            matrix=pair_gram(context, spaces, flux, flux_weight),
            rhs=pair_load(context, spaces, flux, flux_weight * s.F),
            constant=quadrature.integrate(flux_weight * s.F**2),
        ),
        Penalty(
            name="r2",
            r=r2,
            matrix=pair_gram(context, spaces, equation, equation_weight),
            rhs=pair_load(context, spaces, equation, equation_weight * s.f),
            constant=quadrature.integrate(equation_weight * s.f**2),
        ),
    )


def assemble_mf4(
    spaces: Pair,
    family: WeightFamily,
    obs: ObservationSet,
    coeffs: Coefficients,
    r1: float = 1.0,
    r2: float = 1.0,
    eta1: float = 1.0,
    eta2: float = 1.0,
    jump: float = 0.25,
    quadrature: QuadratureSet | None = None,
) -> SaddleSystem:
    """Assembles the augmented first-order formulation.

    The primal unknowns are (y, p), the multipliers (lambda, mu) are piecewise constant:

    - A = integral over q_T of rho0^{-2} y y' + r1 * integral of rho1^{-2} J J' + r2 * integral of rho^{-2} I I'
    - B = [integral of rho^{-1} I(y', p') lambda; integral of rho1^{-1} J(y', p') mu]
    - l2 = [integral of rho^{-1} f lambda; integral of rho1^{-1} F mu]
    - C = jump * sum over interior edges of h_E |E| ([lambda]^2 + [mu]^2)

    Bilinear (y, p) against piecewise constant multipliers admits checkerboard multipliers, alternating from
    cell to cell in x and t, that B only sees through the first and last time levels; the discrete inf-sup
    constant then decays like sqrt(ht) and the multipliers grow under refinement. The jump term removes
    these modes and vanishes on the exact multipliers of consistent data, which are zero.

    Args:
        spaces: bilinear spaces of y (with the Dirichlet condition) and p.
        family: the weights.
        obs: the observation.
        coeffs: coefficients and sources.
        r1: augmentation of the flux equation, >= 0.
        r2: augmentation of the state equation, >= 0.
        eta1: weight of the flux term in the norm of (y, p), > 0.
        eta2: weight of the equation term in the norm of (y, p), > 0.
        jump: weight of the multiplier jumps, >= 0; 0 gives the plain formulation.
        quadrature: assembly quadrature, by default the one of the observation.

    Raises:
        UnsupportedSpace: if a primal space has no first derivatives.
        ConfigError: for negative penalties, a negative jump weight or non-positive norm weights.
    """
    for name, value in (("r1", r1), ("r2", r2), ("jump", jump)):
        check_penalty(name, value)
    for name, value in (("eta1", eta1), ("eta2", eta2)):
        check_penalty(name, value, strict=True)
    context = make_context(family, obs, coeffs, quadrature)
    s = context.samples

    obs_gram, obs_rhs = _observation_block(context, spaces)
    flux_penalty, equation_penalty = _penalties(context, spaces, r1, r2)
    equation = equation_tables(context, spaces)
    flux = flux_tables(context, spaces)

    lam = make_space(BasisKind.PIECEWISE_CONSTANT_P0, context.grid)
    mu = make_space(BasisKind.PIECEWISE_CONSTANT_P0, context.grid)
    psi = context.values(lam)
    B = sps.vstack(
        [
            pair_coupling(context, lam, psi, spaces, equation, context.rho_inv),
            pair_coupling(context, mu, psi, spaces, flux, context.rho1_inv),
        ],
        format="csr",
    )
    l2 = np.concatenate([context.load(lam, psi, context.rho_inv * s.f), context.load(mu, psi, context.rho1_inv * s.F)])
    mass = context.gram(lam, psi, np.ones_like(s.f))
    multiplier_gram = sps.block_diag([mass, mass], format="csr")
    jumps = cell_jump_gram(context.grid)
    C = jump * sps.block_diag([jumps, jumps], format="csr") if jump > 0 else None

    logger.debug(
        f"Assembled mf4: {obs_gram.shape[0]} primal, {B.shape[0]} multipliers, r1={r1}, r2={r2}, "
        f"eta1={eta1}, eta2={eta2}, jump={jump}"
    )
    return SaddleSystem(
        formulation=Formulation.MF4,
        context=context,
        primal_spaces=spaces,
        multiplier_spaces=(lam, mu),
        multiplier_members=(None, None),
        obs_gram=obs_gram,
        obs_rhs=obs_rhs,
        obs_scale=1.0,
        penalties=(flux_penalty, equation_penalty),
        B=B,
        C=C,
        l2=l2,
        primal_gram=mirror(obs_gram + eta1 * flux_penalty.matrix + eta2 * equation_penalty.matrix),
        multiplier_gram=multiplier_gram,
        multiplier_l2_gram=multiplier_gram,
        parameters={"r1": r1, "r2": r2, "eta1": eta1, "eta2": eta2, "jump": jump, "weights": family.kind.value},
    )


def assemble_mf4_alpha(
    spaces: Pair,
    family: WeightFamily,
    obs: ObservationSet,
    coeffs: Coefficients,
    r1: float = 1.0,
    r2: float = 1.0,
    alpha1: float = 0.5,
    alpha2: float = 0.5,
    eta1: float = 1.0,
    eta2: float = 1.0,
    quadrature: QuadratureSet | None = None,
) -> SaddleSystem:
    """Assembles the stabilized first-order formulation in the variables (phi, sigma).

    phi is bilinear, vanishing on the lateral boundary and at t = T, and sigma is bilinear and free;
    the physical multipliers are (lambda, mu) = (rho phi, rho1 sigma).

    - a = (1 - alpha1) * integral over q_T of rho0^{-2} y y' + the r1 and r2 augmentations
    - b((y, p), (phi, sigma)) = integral of J(y, p) sigma + integral of I(y, p) phi
      - alpha1 * integral over q_T of I*(phi, sigma) y
    - c = alpha1 * integral of rho0^2 I* I*' + alpha2 * integral of J(phi, sigma) J(phi', sigma')
    - l2 = integral of f phi + integral of F sigma - alpha1 * integral over q_T of y_obs I*(phi, sigma)

    Raises:
        AlphaOutOfRange: unless 0 < alpha1, alpha2 < 1.
        ConfigError: for negative penalties or non-positive norm weights.
        UnsupportedSpace: if a primal space has no first derivatives.
    """
    check_alpha("alpha1", alpha1)
    check_alpha("alpha2", alpha2)
    for name, value in (("r1", r1), ("r2", r2)):
        check_penalty(name, value)
    for name, value in (("eta1", eta1), ("eta2", eta2)):
        check_penalty(name, value, strict=True)
    context = make_context(family, obs, coeffs, quadrature)
    s = context.samples
    cells = context.obs_cells

    obs_gram, obs_rhs = _observation_block(context, spaces)
    flux_penalty, equation_penalty = _penalties(context, spaces, r1, r2)
    equation = equation_tables(context, spaces)
    flux = flux_tables(context, spaces)

    mult = multiplier_pair_spaces(context.grid)
    adjoint = equation_tables(context, mult, adjoint=True)
    mult_flux = flux_tables(context, mult)
    tests = (context.values(mult[0]), context.values(mult[1]))
    y_values = context.values(spaces[0])
    ones = np.ones_like(s.f)
    on_obs = np.ones((cells.size, context.quadrature.n_points))
    n_p = spaces[1].n_free

    # rows of phi test I, rows of sigma test J; the observation term only sees y
    rows = []
    for space, test, tested, table in zip(mult, tests, (equation, flux), adjoint):
        observed = context.coupling(space, spaces[0], table, y_values, on_obs, cells)
        correction = sps.hstack([observed, sps.csr_matrix((space.n_free, n_p))], format="csr")
        rows.append(pair_coupling(context, space, test, spaces, tested, ones) - alpha1 * correction)
    B = sps.vstack(rows, format="csr")

    l2 = np.concatenate([context.load(mult[0], tests[0], s.f), context.load(mult[1], tests[1], s.F)])
    l2 = l2 - alpha1 * pair_load(context, mult, adjoint, context.obs.values, cells)

    rho0_sq = context.rho0_inv**-2
    adjoint_gram = pair_gram(context, mult, adjoint, rho0_sq)
    C = mirror(alpha1 * adjoint_gram + alpha2 * pair_gram(context, mult, mult_flux, ones))

    phi_dx = context.tables(mult[0], Derivative.DX)[Derivative.DX]
    l2_gram = sps.block_diag(
        [context.gram(mult[0], tests[0], context.rho_inv**-2), context.gram(mult[1], tests[1], context.rho1_inv**-2)],
        format="csr",
    )
    norm_gram = sps.block_diag(
        [context.gram(mult[0], phi_dx, context.rho_inv**2), context.gram(mult[1], tests[1], ones)], format="csr"
    )

    logger.debug(
        f"Assembled mf4-alpha: {obs_gram.shape[0]} primal, {B.shape[0]} multipliers, "
        f"alpha1={alpha1}, alpha2={alpha2}"
    )
    return SaddleSystem(
        formulation=Formulation.MF4_ALPHA,
        context=context,
        primal_spaces=spaces,
        multiplier_spaces=mult,
        multiplier_members=(Member.RHO, Member.RHO1),
        obs_gram=obs_gram,
        obs_rhs=obs_rhs,
        obs_scale=1.0 - alpha1,
        penalties=(flux_penalty, equation_penalty),
        B=B,
        C=C,
        l2=l2,
        primal_gram=mirror(obs_gram + eta1 * flux_penalty.matrix + eta2 * equation_penalty.matrix),
        multiplier_gram=mirror(norm_gram + adjoint_gram),
        multiplier_l2_gram=l2_gram,
        parameters={
            "r1": r1,
            "r2": r2,
            "alpha1": alpha1,
            "alpha2": alpha2,
            "eta1": eta1,
            "eta2": eta2,
            "weights": family.kind.value,
        },
    )
