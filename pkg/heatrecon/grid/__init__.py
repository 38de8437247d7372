"""Space-time grids, finite-element spaces and quadrature."""

from heatrecon.grid.mesh import SpaceTimeGrid, build_grid
from heatrecon.grid.quadrature import QuadratureSet, quadrature_points
from heatrecon.grid.spaces import BasisEval, FemSpace, eval_basis, make_space

__all__ = [
    "BasisEval",
    "FemSpace",
    "QuadratureSet",
    "SpaceTimeGrid",
    "build_grid",
    "eval_basis",
    "make_space",
    "quadrature_points",
]
