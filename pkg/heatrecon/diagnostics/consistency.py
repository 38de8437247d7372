"""Module for the consistency residuals of the reconstructed multipliers.

At the continuous level the multiplier solves L*(rho^{-1} lambda) = -rho_0^{-2}(y - y_obs) 1_omega; in
the first-order setting (phi, sigma) = (rho^{-1} lambda, rho_1^{-1} mu) solves
I*(phi, sigma) = -rho_0^{-2}(y - y_obs) 1_omega and J(phi, sigma) = 0. The residuals below are these
relations tested against the primal space, together with the augmentation terms, so that they vanish
at a solution of the plain formulations.
"""

from __future__ import annotations

import numpy as np
from loguru import logger

from heatrecon.enums.weights import Member
from heatrecon.firstorder.operators import PairField, apply_IJ, equation_tables, flux_tables, pair_load
from heatrecon.forward.coefficients import Coefficients
from heatrecon.forward.field import Field
from heatrecon.grid.quadrature import QuadratureSet
from heatrecon.observe.observation import ObservationSet
from heatrecon.secondorder.forms import FormContext
from heatrecon.secondorder.formulations import make_context
from heatrecon.weights.family import WeightFamily


def _scaled(context: FormContext, multiplier: Field, member: Member | None, inverse: np.ndarray) -> np.ndarray:
    """w^{-1} times the physical multiplier, at the quadrature points."""

    values = multiplier.at_quadrature(context.quadrature)
    return inverse * values if member is None else values


def _misfit(context: FormContext, y: Field) -> np.ndarray:
    cells = context.obs_cells
    return context.rho0_inv[cells] ** 2 * (y.at_quadrature(context.quadrature)[cells] - context.obs.values)


def multiplier_consistency(
    lam: Field,
    y: Field,
    obs: ObservationSet,
    family: WeightFamily,
    coeffs: Coefficients,
    r: float = 0.0,
    member: Member | None = None,
    quadrature: QuadratureSet | None = None,
) -> float:
    """Euclidean norm of the residual vector

        R_i = integral of (rho^{-1} lambda) L psi_i + integral over q_T of rho_0^{-2}(y - y_obs) psi_i
              + r * integral of rho^{-2}(L y - f) L psi_i

    over the free DOFs psi_i of the space of y.

    Args:
        lam: the multiplier field.
        y: the state, in a space that represents L.
        obs: the observation.
        family: the weights.
        coeffs: coefficients and sources.
        r: augmentation parameter of the solve.
        member: None when `lam` is the multiplier itself, RHO when lambda = rho * lam.
        quadrature: assembly quadrature, by default the one of the observation.
    """
    context = make_context(family, obs, coeffs, quadrature)
    space = y.space
    L = context.operator(space)

    residual = context.load(space, L, _scaled(context, lam, member, context.rho_inv))
    residual += context.load(space, context.values(space), _misfit(context, y), context.obs_cells)
    if r:
        equation = context.apply_operator(y) - context.samples.f
        residual += r * context.load(space, L, context.rho_inv**2 * equation)

    norm = float(np.linalg.norm(residual))
    logger.debug(f"Multiplier consistency residual: {norm:.3e}")
    return norm


def mixed_multiplier_consistency(
    lam: Field,
    mu: Field,
    pair: PairField,
    obs: ObservationSet,
    family: WeightFamily,
    coeffs: Coefficients,
    r1: float = 0.0,
    r2: float = 0.0,
    members: tuple[Member | None, Member | None] = (None, None),
    quadrature: QuadratureSet | None = None,
) -> float:
    """First-order analogue of `multiplier_consistency`, tested against the pair space of (y, p).

        R = integral of (rho^{-1} lambda) I(u) + integral of (rho_1^{-1} mu) J(u)
            + integral over q_T of rho_0^{-2}(y - y_obs) u_y
            + r1 * integral of rho_1^{-2}(J(y, p) - F) J(u) + r2 * integral of rho^{-2}(I(y, p) - f) I(u)
    """
    context = make_context(family, obs, coeffs, quadrature)
    spaces = pair.spaces
    equation_t = equation_tables(context, spaces)
    flux_t = flux_tables(context, spaces)
    s = context.samples

    residual = pair_load(context, spaces, equation_t, _scaled(context, lam, members[0], context.rho_inv))
    residual += pair_load(context, spaces, flux_t, _scaled(context, mu, members[1], context.rho1_inv))
    observed = context.load(spaces[0], context.values(spaces[0]), _misfit(context, pair.y), context.obs_cells)
    residual[: spaces[0].n_free] += observed
    if r1 or r2:
        equation, flux = apply_IJ(pair, coeffs, context.quadrature)
        residual += r1 * pair_load(context, spaces, flux_t, context.rho1_inv**2 * (flux - s.F))
        residual += r2 * pair_load(context, spaces, equation_t, context.rho_inv**2 * (equation - s.f))

    norm = float(np.linalg.norm(residual))
    logger.debug(f"Mixed multiplier consistency residual: {norm:.3e}")
    return norm
