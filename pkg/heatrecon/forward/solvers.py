"""Module for the forward solvers of the parabolic equation.

Both solvers are Galerkin P1 in space and step through the time levels of the grid, so that the
trajectory lands on the nodes of the space-time Q1 space.
"""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import scipy.sparse as sps
from loguru import logger
from scipy.sparse.linalg import splu

from heatrecon.constants import DEFAULT_ORDER
from heatrecon.enums.spaces import BasisKind
from heatrecon.errors import ConfigError, SingularBm, SingularStep
from heatrecon.forward.coefficients import Coefficients
from heatrecon.forward.field import Field
from heatrecon.forward.spatial import SpatialDiscretization
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.spaces import make_space


def _march(
    grid: SpaceTimeGrid,
    mass: sps.csr_matrix,
    operator: Callable[[float], sps.csr_matrix],
    load: Callable[[float], np.ndarray],
    initial: np.ndarray,
    theta: float,
) -> np.ndarray:
    """Integrates M Y' + A(t) Y = b(t) with the theta scheme on the time levels of the grid.

    Returns:
        The interior nodal values at every time level, shape (nt + 1, n_interior).
    """
    dt = grid.ht
    trajectory = np.zeros((grid.nt + 1, initial.size))
    trajectory[0] = initial
    if initial.size == 0:
        return trajectory

    a_now, b_now = operator(0.0), load(0.0)
    for j, t_next in enumerate(grid.t_nodes[1:]):
        a_next, b_next = operator(t_next), load(t_next)
        lhs = (mass + theta * dt * a_next).tocsc()
        rhs = (mass - (1.0 - theta) * dt * a_now) @ trajectory[j] + dt * (theta * b_next + (1.0 - theta) * b_now)
        try:
            step = splu(lhs).solve(rhs)
        except RuntimeError as e:
            raise SingularStep(f"time step {j + 1} matrix is singular: {e}") from e
        if not np.all(np.isfinite(step)):
            raise SingularStep(f"time step {j + 1} produced non-finite values")
        trajectory[j + 1] = step
        a_now, b_now = a_next, b_next
    return trajectory


def _nodal_field(grid: SpaceTimeGrid, trajectory: np.ndarray) -> Field:
    """Places interior nodal values per time level onto the space-time Q1 space."""

    space = make_space(BasisKind.BILINEAR_Q1, grid)
    values = np.zeros((grid.nt + 1, grid.nx + 1))
    values[:, 1:-1] = trajectory
    return Field(space, values.ravel())


def solve_forward(grid: SpaceTimeGrid, coeffs: Coefficients, theta: float = 0.5) -> Field:
    """Solves y_t - (c y_x)_x + d y = f with homogeneous Dirichlet data and y(0) = y0.

    Args:
        grid: the space-time grid; its time levels are the time steps.
        coeffs: coefficients and data.
        theta: 0.5 for Crank-Nicolson, 1 for backward Euler.

    Returns:
        The trajectory as a field of the space-time Q1 space.

    Raises:
        ConfigError: if theta is outside [0.5, 1].
        SingularStep: if a time-step matrix cannot be factorized.
    """
    if not 0.5 <= theta <= 1.0:
        raise ConfigError(f"theta must lie in [0.5, 1], got {theta}")

    spatial = SpatialDiscretization(grid, coeffs, DEFAULT_ORDER)
    initial = coeffs.y0(grid.x_nodes[1:-1])
    trajectory = _march(
        grid,
        spatial.mass,
        lambda t: spatial.stiffness + spatial.reaction(t),
        lambda t: spatial.load(coeffs.f, t),
        np.asarray(initial, dtype=float),
        theta,
    )
    logger.debug(f"Forward theta={theta} solve on {grid.nx}x{grid.nt} grid done")
    return _nodal_field(grid, trajectory)


def solve_forward_mixed(grid: SpaceTimeGrid, coeffs: Coefficients) -> tuple[Field, Field]:
    """Solves the first-order system y_t - p_x + d y = f, c y_x - p = F by Faedo-Galerkin.

    y is P1 in space and p is P0 in space. The flux block B_m is diagonal, so p is eliminated and
    the reduced system M Y' + (E B_m^{-1} E^T + D) Y = f + E B_m^{-1} F_m is integrated with
    Crank-Nicolson. The flux is recovered as P = B_m^{-1} (E^T Y - F_m) at every time level.

    Returns:
        y on the space-time Q1 space, and p on the space-time P0 space as the mean of the two
        time levels of each cell.

    Raises:
        SingularBm: if B_m has a non-positive or non-finite entry.
        SingularStep: if a time-step matrix cannot be factorized.
    """
    spatial = SpatialDiscretization(grid, coeffs, DEFAULT_ORDER)
    flux_mass = spatial.flux_mass
    if not np.all(np.isfinite(flux_mass)) or np.any(flux_mass <= 0.0):
        raise SingularBm("the flux mass matrix is singular")

    E = spatial.divergence
    inverse = sps.diags(1.0 / flux_mass)
    coupling = (E @ inverse @ E.T).tocsr()

    trajectory = _march(
        grid,
        spatial.mass,
        lambda t: coupling + spatial.reaction(t),
        lambda t: spatial.load(coeffs.f, t) + E @ (spatial.flux_load(t) / flux_mass),
        np.asarray(coeffs.y0(grid.x_nodes[1:-1]), dtype=float),
        0.5,
    )

    levels = np.zeros((grid.nt + 1, grid.nx))
    for j, t in enumerate(grid.t_nodes):
        levels[j] = (E.T @ trajectory[j] - spatial.flux_load(t)) / flux_mass

    p_space = make_space(BasisKind.PIECEWISE_CONSTANT_P0, grid)
    p = Field(p_space, (0.5 * (levels[:-1] + levels[1:])).ravel())
    logger.debug(f"Mixed forward solve on {grid.nx}x{grid.nt} grid done")
    return _nodal_field(grid, trajectory), p
