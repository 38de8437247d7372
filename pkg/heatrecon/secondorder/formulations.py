"""Module for the assembly of the second-order mixed formulations.

Both formulations work on a C1 Hermite primal space, since L y needs y_t and y_xx in L2. The plain
formulation takes its multiplier in P0, Q1 or, as lambda = rho * phi, in the Hermite space of the
stabilized formulation.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.sparse as sps
from loguru import logger

from heatrecon.enums.formulations import Formulation, MultiplierKind
from heatrecon.enums.spaces import BasisKind
from heatrecon.enums.weights import Member
from heatrecon.errors import AlphaOutOfRange, ConfigError
from heatrecon.forward.coefficients import Coefficients
from heatrecon.grid.assembly import mirror
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import QuadratureSet, quadrature_points
from heatrecon.grid.spaces import FemSpace, make_space
from heatrecon.observe.observation import ObservationSet
from heatrecon.secondorder.forms import FormContext
from heatrecon.secondorder.system import Penalty, SaddleSystem
from heatrecon.weights.family import WeightFamily

_MULTIPLIER_BASES = {
    MultiplierKind.P0: BasisKind.PIECEWISE_CONSTANT_P0,
    MultiplierKind.Q1: BasisKind.BILINEAR_Q1,
    MultiplierKind.HERMITE: BasisKind.HERMITE_C1_TENSOR,
}


def check_penalty(name: str, value: float, strict: bool = False) -> None:
    """Raises ConfigError for a negative (or, if `strict`, non-positive) penalty or norm parameter."""

    if not math.isfinite(value) or value < 0 or (strict and value == 0):
        bound = "> 0" if strict else ">= 0"
        raise ConfigError(f"{name} must be {bound}, got {value}")


def check_alpha(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise AlphaOutOfRange(f"{name} must lie in (0, 1), got {value}")


def multiplier_space(kind: MultiplierKind, primal_space: FemSpace) -> FemSpace:
    """The multiplier space of a kind on the grid of the primal space.

    The Hermite multiplier space vanishes on the lateral boundary and at t = T.
    """
    basis = _MULTIPLIER_BASES[kind]
    if basis is BasisKind.PIECEWISE_CONSTANT_P0:
        return make_space(basis, primal_space.grid)
    if basis is BasisKind.BILINEAR_Q1:
        return make_space(basis, primal_space.grid, dirichlet=False)
    return make_space(basis, primal_space.grid, dirichlet=True, terminal=True)


def make_context(
    family: WeightFamily, obs: ObservationSet, coeffs: Coefficients, quadrature: QuadratureSet | None = None
) -> FormContext:
    """Samples weights and coefficients on the quadrature of the observation."""

    if quadrature is None:
        quadrature = quadrature_points(obs.grid, obs.order)
    return FormContext(quadrature, family, obs, coeffs)


def equation_penalty(context: FormContext, space: FemSpace, table: np.ndarray, r: float) -> Penalty:
    """r * ||rho^{-1}(L y - f)||^2."""

    weight = context.rho_inv**2
    f = context.samples.f
    return Penalty(
        name="r",
        r=r,
        matrix=context.gram(space, table, weight),
        rhs=context.load(space, table, weight * f),
        constant=context.quadrature.integrate(weight * f**2),
    )


def assemble_mf(
    primal_space: FemSpace,
    multiplier: MultiplierKind,
    family: WeightFamily,
    obs: ObservationSet,
    coeffs: Coefficients,
    r: float = 1.0,
    eta: float = 1.0,
    quadrature: QuadratureSet | None = None,
) -> SaddleSystem:
    """Assembles the augmented mixed formulation with constraint rho^{-1}(L y - f) = 0.

    A_r = integral over q_T of rho0^{-2} phi_i phi_j + r * integral of rho^{-2} L phi_i L phi_j,
    B_kj = integral of rho^{-1} L phi_j psi_k, l1 = integral over q_T of rho0^{-2} y_obs phi_i
    (+ r * integral of rho^{-2} f L phi_i) and l2 = integral of rho^{-1} f psi_k. With the Hermite
    multiplier, psi_k = rho * phi_k.

    Args:
        primal_space: a Hermite space with the lateral Dirichlet condition.
        multiplier: the multiplier space.
        family: the weights.
        obs: the observation.
        coeffs: coefficients and sources.
        r: augmentation parameter, >= 0.
        eta: weight of the equation term in the norm of the primal space, > 0.
        quadrature: assembly quadrature, by default the one of the observation.

    Raises:
        UnsupportedSpace: if the primal space has no second x-derivative.
        ConfigError: for r < 0 or eta <= 0.
    """
    check_penalty("r", r)
    check_penalty("eta", eta, strict=True)
    context = make_context(family, obs, coeffs, quadrature)
    L = context.operator(primal_space)
    mult = multiplier_space(multiplier, primal_space)
    psi = context.values(mult)

    obs_gram, obs_rhs = context.observation_block(primal_space)
    penalty = equation_penalty(context, primal_space, L, r)
    f = context.samples.f
    if multiplier is MultiplierKind.HERMITE:
        members = (Member.RHO,)
        B = context.coupling(mult, primal_space, psi, L, np.ones_like(f))
        l2 = context.load(mult, psi, f)
        l2_gram = context.gram(mult, psi, context.rho_inv**-2)
    else:
        members = (None,)
        B = context.coupling(mult, primal_space, psi, L, context.rho_inv)
        l2 = context.load(mult, psi, context.rho_inv * f)
        l2_gram = context.gram(mult, psi, np.ones_like(f))

    logger.debug(
        f"Assembled mf: {primal_space.n_free} primal, {mult.n_free} {multiplier.value} multipliers, r={r}, eta={eta}"
    )
    return SaddleSystem(
        formulation=Formulation.MF,
        context=context,
        primal_spaces=(primal_space,),
        multiplier_spaces=(mult,),
        multiplier_members=members,
        obs_gram=obs_gram,
        obs_rhs=obs_rhs,
        obs_scale=1.0,
        penalties=(penalty,),
        B=B,
        C=None,
        l2=l2,
        primal_gram=mirror(obs_gram + eta * penalty.matrix),
        multiplier_gram=l2_gram,
        multiplier_l2_gram=l2_gram,
        parameters={"r": r, "eta": eta, "multiplier": multiplier.value, "weights": family.kind.value},
    )


def assemble_mf_alpha(
    primal_space: FemSpace,
    family: WeightFamily,
    obs: ObservationSet,
    coeffs: Coefficients,
    r: float = 1.0,
    alpha: float = 0.5,
    eta: float = 1.0,
    quadrature: QuadratureSet | None = None,
) -> SaddleSystem:
    """Assembles the stabilized mixed formulation in the variable phi = rho^{-1} lambda.

    With phi in the Hermite space vanishing on the lateral boundary and at t = T:

    - a(y, y') = (1 - alpha) * integral over q_T of rho0^{-2} y y' + r * integral of rho^{-2} L y L y'
    - b(y, phi) = integral of L y phi - alpha * integral over q_T of L* phi y
    - c(phi, phi') = alpha * integral of rho0^2 L* phi L* phi'
    - l1(y) = (1 - alpha) * integral over q_T of rho0^{-2} y_obs y (+ r * integral of rho^{-2} f L y)
    - l2(phi) = integral of f phi - alpha * integral over q_T of y_obs L* phi

    Raises:
        AlphaOutOfRange: unless 0 < alpha < 1.
        ConfigError: for r < 0 or eta <= 0.
        UnsupportedSpace: if the primal space has no second x-derivative.
    """
    check_alpha("alpha", alpha)
    check_penalty("r", r)
    check_penalty("eta", eta, strict=True)
    context = make_context(family, obs, coeffs, quadrature)
    L = context.operator(primal_space)
    mult = multiplier_space(MultiplierKind.HERMITE, primal_space)
    phi = context.values(mult)
    L_star = context.operator(mult, adjoint=True)
    values = context.values(primal_space)

    cells = context.obs_cells
    obs_gram, obs_rhs = context.observation_block(primal_space)
    penalty = equation_penalty(context, primal_space, L, r)
    f = context.samples.f
    ones = np.ones_like(f)
    on_obs = np.ones((cells.size, context.quadrature.n_points))

    B = context.coupling(mult, primal_space, phi, L, ones) - alpha * context.coupling(
        mult, primal_space, L_star, values, on_obs, cells
    )
    l2 = context.load(mult, phi, f) - alpha * context.load(mult, L_star, context.obs.values, cells)
    adjoint_gram = context.gram(mult, L_star, context.rho0_inv**-2)
    l2_gram = context.gram(mult, phi, context.rho_inv**-2)

    logger.debug(f"Assembled mf-alpha: {primal_space.n_free} primal, {mult.n_free} multipliers, alpha={alpha}")
    return SaddleSystem(
        formulation=Formulation.MF_ALPHA,
        context=context,
        primal_spaces=(primal_space,),
        multiplier_spaces=(mult,),
        multiplier_members=(Member.RHO,),
        obs_gram=obs_gram,
        obs_rhs=obs_rhs,
        obs_scale=1.0 - alpha,
        penalties=(penalty,),
        B=sps.csr_matrix(B),
        C=mirror(alpha * adjoint_gram),
        l2=l2,
        primal_gram=mirror(obs_gram + eta * penalty.matrix),
        multiplier_gram=mirror(l2_gram + adjoint_gram),
        multiplier_l2_gram=l2_gram,
        parameters={"r": r, "eta": eta, "alpha": alpha, "weights": family.kind.value},
    )


def hermite_primal_space(grid: SpaceTimeGrid) -> FemSpace:
    """The primal space of the second-order formulations."""
    return make_space(BasisKind.HERMITE_C1_TENSOR, grid, dirichlet=True)
