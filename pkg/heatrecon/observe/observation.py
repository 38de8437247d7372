"""Module for observations on q_T = omega x (0, T) and the weighted misfit."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from loguru import logger

from heatrecon.constants import SNAP_TOLERANCE
from heatrecon.enums.weights import Member
from heatrecon.errors import ConfigError, IoError, LayoutMismatch
from heatrecon.forward.field import Field
from heatrecon.grid.mesh import SpaceTimeGrid
from heatrecon.grid.quadrature import QuadratureSet, quadrature_points
from heatrecon.storage.utils import read_csv, read_json, write_csv, write_json
from heatrecon.weights.beta import check_omega
from heatrecon.weights.family import WeightFamily

COLUMNS = ("x", "t", "value")


@dataclass(frozen=True, eq=False)
class ObservationSet:
    """Samples of the state at the quadrature points of the cells of q_T.

    Attributes:
        grid: the reconstruction grid.
        order: quadrature order of the samples.
        omega: the observation interval, snapped to cell boundaries.
        cells: flat indices of the observed cells, increasing.
        values: samples, shape (len(cells), nq), in quadrature point order.
        sigma: standard deviation of the added noise.
        seed: seed of the noise generator.
    """

    grid: SpaceTimeGrid
    order: int
    omega: tuple[float, float]
    cells: np.ndarray
    values: np.ndarray
    sigma: float = 0.0
    seed: int | None = None

    @property
    def n_samples(self) -> int:
        return self.values.size

    @property
    def mask(self) -> np.ndarray:
        """Boolean mask of the observed cells."""
        mask = np.zeros(self.grid.n_cells, dtype=bool)
        mask[self.cells] = True
        return mask

    def check_layout(self, quadrature: QuadratureSet) -> None:
        """Raises LayoutMismatch unless the samples sit on the points of `quadrature`."""

        if not self.grid.same_layout(quadrature.grid) or self.order != quadrature.order:
            raise LayoutMismatch(
                f"observation on {self.grid.nx}x{self.grid.nt} order {self.order} used with "
                f"{quadrature.grid.nx}x{quadrature.grid.nt} order {quadrature.order}"
            )

    def points(self, quadrature: QuadratureSet) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates of the samples."""
        self.check_layout(quadrature)
        return quadrature.x[self.cells], quadrature.t[self.cells]

    def weighted_norm(self, family: WeightFamily, quadrature: QuadratureSet) -> float:
        """||rho0^{-1} y_obs||_{L2(q_T)}."""

        x, t = self.points(quadrature)
        weighted = family.inverse(Member.RHO0, x, t) * self.values
        return math.sqrt(quadrature.integrate(weighted**2, self.cells))

    def save(self, path: Path, quadrature: QuadratureSet) -> None:
        """Writes the samples as (x, t, value) rows, and sigma and seed to the JSON file next to them."""

        x, t = self.points(quadrature)
        write_csv(path, COLUMNS, np.column_stack([x.ravel(), t.ravel(), self.values.ravel()]))
        write_json(metadata_path(path), {"omega": list(self.omega), "sigma": self.sigma, "seed": self.seed})

    @classmethod
    def load(cls, path: Path, quadrature: QuadratureSet) -> ObservationSet:
        """Reads samples written by `save` and checks they sit on the points of `quadrature`.

        Without the JSON file next to the samples, sigma is 0 and the seed unknown.

        Raises:
            IoError: if a file cannot be read.
            LayoutMismatch: if the samples are not the quadrature points of whole cells.
        """
        data = read_csv(path, COLUMNS)
        nq = quadrature.n_points
        if data.shape[0] == 0 or data.shape[0] % nq:
            raise LayoutMismatch(f"{path}: {data.shape[0]} samples do not fill whole cells of {nq} points")
        x, t, values = (data[:, k].reshape(-1, nq) for k in range(3))
        cells, _, _ = quadrature.grid.locate(x.mean(axis=1), t.mean(axis=1))
        if not (
            np.allclose(quadrature.x[cells], x, rtol=0.0, atol=1e-12)
            and np.allclose(quadrature.t[cells], t, rtol=0.0, atol=1e-12)
        ):
            raise LayoutMismatch(f"{path}: samples are not at the quadrature points of the grid")
        grid = quadrature.grid
        corners = grid.cells[cells]
        omega = (float(corners[:, 0].min()), float(corners[:, 1].max()))
        order = np.argsort(cells)
        sigma, seed = 0.0, None
        if metadata_path(path).exists():
            metadata = read_json(metadata_path(path))
            try:
                sigma = float(metadata["sigma"])
                seed = None if metadata["seed"] is None else int(metadata["seed"])
            except (KeyError, TypeError, ValueError) as e:
                raise IoError(f"{metadata_path(path)}: malformed observation metadata: {e}") from e
        else:
            logger.warning(f"No {metadata_path(path).name} next to {path}: sigma and seed are unknown")
        logger.info(f"Loaded {values.size} observation samples from {path}")
        return cls(grid, quadrature.order, omega, cells[order], values[order], sigma, seed)


def metadata_path(path: Path) -> Path:
    """The JSON file holding sigma and seed of the samples in `path`."""
    return Path(path).with_suffix(".json")


def snap_omega(omega: tuple[float, float], grid: SpaceTimeGrid) -> tuple[tuple[float, float], np.ndarray]:
    """Widens omega to the union of the cells it intersects.

    Returns:
        The snapped interval and the spatial indices of its cells.
    """
    a, b = omega
    lo = (a - grid.x_min) / grid.hx
    hi = (b - grid.x_min) / grid.hx
    i_lo = int(round(lo)) if abs(lo - round(lo)) <= SNAP_TOLERANCE * max(1.0, abs(lo)) else int(math.floor(lo))
    i_hi = int(round(hi)) if abs(hi - round(hi)) <= SNAP_TOLERANCE * max(1.0, abs(hi)) else int(math.ceil(hi))
    i_lo, i_hi = max(i_lo, 0), min(i_hi, grid.nx)
    snapped = (float(grid.x_nodes[i_lo]), float(grid.x_nodes[i_hi]))
    if not (math.isclose(snapped[0], a, abs_tol=1e-12) and math.isclose(snapped[1], b, abs_tol=1e-12)):
        logger.warning(f"Observation interval ({a}, {b}) snapped to cell boundaries {snapped}")
    return snapped, np.arange(i_lo, i_hi)


def make_observation(
    truth: Field,
    omega: tuple[float, float],
    grid: SpaceTimeGrid,
    quadrature: QuadratureSet,
    sigma: float = 0.0,
    seed: int | None = None,
) -> ObservationSet:
    """Samples a ground-truth field on q_T at the quadrature points of the reconstruction grid.

    The truth may live on another (finer) grid; it is evaluated at the points of `quadrature`.

    Args:
        truth: the ground truth.
        omega: observation interval, strictly inside the domain.
        grid: the reconstruction grid.
        quadrature: its quadrature.
        sigma: standard deviation of additive i.i.d. Gaussian noise.
        seed: seed of the noise generator.

    Raises:
        OmegaOutsideDomain: if omega is not strictly inside the domain.
        DegenerateOmega: if omega is empty.
        ConfigError: if sigma < 0.
    """
    check_omega(omega, (grid.x_min, grid.x_max))
    if not sigma >= 0:
        raise ConfigError(f"sigma must be non-negative, got {sigma}")

    snapped, columns = snap_omega(omega, grid)
    cells = (np.arange(grid.nt)[:, None] * grid.nx + columns[None, :]).ravel()
    values = truth.evaluate(quadrature.x[cells], quadrature.t[cells])
    if sigma > 0:
        values = values + np.random.default_rng(seed).normal(0.0, sigma, size=values.shape)
    logger.info(f"Observation on omega={snapped}: {values.size} samples, sigma={sigma}, seed={seed}")
    return ObservationSet(grid, quadrature.order, snapped, cells, values, float(sigma), seed)


def weighted_misfit(
    y: Field, obs: ObservationSet, family: WeightFamily, quadrature: QuadratureSet | None = None
) -> float:
    """J(y) = 1/2 of the integral over q_T of rho0^{-2} (y - y_obs)^2.

    The quadrature defaults to the one the observation was sampled on.

    Raises:
        LayoutMismatch: if the observation or y do not live on the grid of `quadrature`.
    """
    if quadrature is None:
        quadrature = quadrature_points(obs.grid, obs.order)
    obs.check_layout(quadrature)
    if not y.space.grid.same_layout(quadrature.grid):
        raise LayoutMismatch("the field and the observation live on different grids")
    x, t = obs.points(quadrature)
    residual = family.inverse(Member.RHO0, x, t) * (y.at_quadrature(quadrature)[obs.cells] - obs.values)
    return 0.5 * quadrature.integrate(residual**2, obs.cells)
