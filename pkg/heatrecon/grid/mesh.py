"""Module for the uniform space-time tensor grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from loguru import logger

from heatrecon.errors import InvalidExtent


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform tensor grid of Q_T = (x_min, x_max) x (0, T).

    Cell (i, j) spans [x_i, x_{i+1}] x [t_j, t_{j+1}] and has the flat index k = j * nx + i, so that
    cells are stored slab by slab in time. Nodes are numbered the same way with nx + 1 nodes per row.

    Attributes:
        x_min: left end of the spatial domain.
        x_max: right end of the spatial domain.
        T: time horizon.
        nx: number of cells in space.
        nt: number of cells in time.
    """

    x_min: float
    x_max: float
    T: float
    nx: int
    nt: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max) and math.isfinite(self.T)):
            raise InvalidExtent(f"non-finite grid extent ({self.x_min}, {self.x_max}, {self.T})")
        if self.x_min >= self.x_max:
            raise InvalidExtent(f"x_min must be < x_max, got ({self.x_min}, {self.x_max})")
        if self.T <= 0:
            raise InvalidExtent(f"T must be positive, got {self.T}")
        if int(self.nx) != self.nx or int(self.nt) != self.nt or self.nx < 1 or self.nt < 1:
            raise InvalidExtent(f"element counts must be integers >= 1, got nx={self.nx}, nt={self.nt}")

    @property
    def hx(self) -> float:
        """Cell width."""
        return (self.x_max - self.x_min) / self.nx

    @property
    def ht(self) -> float:
        """Cell height (time step)."""
        return self.T / self.nt

    @property
    def n_cells(self) -> int:
        """Number of cells."""
        return self.nx * self.nt

    @property
    def n_nodes(self) -> int:
        """Number of grid nodes."""
        return (self.nx + 1) * (self.nt + 1)

    @property
    def cell_area(self) -> float:
        """Area of one cell."""
        return self.hx * self.ht

    @cached_property
    def x_nodes(self) -> np.ndarray:
        """Spatial node coordinates."""
        return np.linspace(self.x_min, self.x_max, self.nx + 1)

    @cached_property
    def t_nodes(self) -> np.ndarray:
        """Time node coordinates."""
        return np.linspace(0.0, self.T, self.nt + 1)

    @cached_property
    def cells(self) -> np.ndarray:
        """Per-cell corner coordinates as rows (x_left, x_right, t_bottom, t_top)."""

        i, j = self.cell_indices
        return np.column_stack(
            [self.x_nodes[i], self.x_nodes[i + 1], self.t_nodes[j], self.t_nodes[j + 1]]
        )

    @cached_property
    def cell_indices(self) -> tuple[np.ndarray, np.ndarray]:
        """Space and time indices (i, j) of every cell in flat order."""

        k = np.arange(self.n_cells)
        return k % self.nx, k // self.nx

    @cached_property
    def node_coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinates (x, t) of every node in flat order."""

        xx, tt = np.meshgrid(self.x_nodes, self.t_nodes)
        return xx.ravel(), tt.ravel()

    def cell_index(self, i: int, j: int) -> int:
        """Flat index of cell (i, j)."""
        return j * self.nx + i

    def locate(self, x: np.ndarray, t: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Finds the cell containing each point and the local coordinates inside it.

        Points on an interior cell boundary are attributed to the cell on their right/top. Points on
        the outer boundary belong to the adjacent cell.

        Args:
            x: spatial coordinates.
            t: time coordinates.

        Returns:
            Flat cell indices, and the local coordinates (xi, tau) in [0, 1]^2.
        """
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        i = np.clip(np.floor((x - self.x_min) / self.hx).astype(int), 0, self.nx - 1)
        j = np.clip(np.floor(t / self.ht).astype(int), 0, self.nt - 1)
        xi = (x - self.x_nodes[i]) / self.hx
        tau = (t - self.t_nodes[j]) / self.ht
        return j * self.nx + i, xi, tau

    def refined(self, factor: int = 2) -> SpaceTimeGrid:
        """The nested grid with every cell split `factor` times in each direction."""
        return SpaceTimeGrid(self.x_min, self.x_max, self.T, self.nx * factor, self.nt * factor)

    def same_layout(self, other: SpaceTimeGrid) -> bool:
        """Whether two grids describe the same tiling."""
        return self == other


def build_grid(x_min: float, x_max: float, T: float, nx: int, nt: int) -> SpaceTimeGrid:
    """Builds a uniform space-time grid.

    Args:
        x_min: left end of the spatial domain.
        x_max: right end of the spatial domain.
        T: time horizon.
        nx: number of cells in space.
        nt: number of cells in time.

    Returns:
        The grid, with nx * nt cells.

    Raises:
        InvalidExtent: if x_min >= x_max, T <= 0 or a count is below 1.
    """
    grid = SpaceTimeGrid(float(x_min), float(x_max), float(T), nx, nt)
    logger.debug(f"Built {nx}x{nt} grid of ({x_min}, {x_max}) x (0, {T})")
    return grid
