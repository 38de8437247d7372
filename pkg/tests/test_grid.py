import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatrecon.enums.spaces import BasisKind, Derivative
from heatrecon.errors import InvalidExtent, UnsupportedDerivative, UnsupportedOrder
from heatrecon.grid import build_grid, eval_basis, make_space, quadrature_points
from heatrecon.grid.assembly import assemble_linear, assemble_symmetric
from heatrecon.grid.spaces import evaluate, interpolate, quadrature_tables

unit = st.floats(min_value=0.0, max_value=1.0)


def bicubic(x, t):
    return x**3 * t**2 - 2.0 * x * t**3 + x**2 + 0.5


def bicubic_dx(x, t):
    return 3.0 * x**2 * t**2 - 2.0 * t**3 + 2.0 * x


def bicubic_dt(x, t):
    return 2.0 * x**3 * t - 6.0 * x * t**2


def bicubic_dxdt(x, t):
    return 6.0 * x**2 * t - 6.0 * t**2


def bicubic_dxx(x, t):
    return 6.0 * x * t**2 + 2.0


@pytest.mark.parametrize(
    "extent",
    [
        (1.0, 0.0, 1.0, 2, 2),
        (0.0, 1.0, 0.0, 2, 2),
        (0.0, 1.0, -1.0, 2, 2),
        (0.0, 1.0, 1.0, 0, 2),
        (0.0, 1.0, 1.0, 2, 0),
    ],
)
def test_invalid_extent_is_rejected(extent):
    with pytest.raises(InvalidExtent):
        build_grid(*extent)


def test_single_cell_rule_has_nine_points_summing_to_area():
    grid = build_grid(0.0, 2.0, 0.5, 1, 1)
    quadrature = quadrature_points(grid, 3)
    assert quadrature.n_points == 9
    assert quadrature.w.sum() == pytest.approx(grid.cell_area, rel=1e-14)


@pytest.mark.parametrize("order", [2, 3, 4])
def test_rule_integrates_polynomials_exactly(order):
    grid = build_grid(0.0, 1.0, 2.0, 3, 5)
    quadrature = quadrature_points(grid, order)
    degree = 2 * order - 1
    exact = 2.0 ** (degree + 1) / (degree + 1) ** 2
    assert quadrature.integrate(quadrature.x**degree * quadrature.t**degree) == pytest.approx(exact, rel=1e-12)


def test_quadrature_points_are_strictly_interior(grid, quadrature):
    corners = grid.cells
    assert np.all(quadrature.x > corners[:, [0]]) and np.all(quadrature.x < corners[:, [1]])
    assert np.all(quadrature.t > 0.0)


@pytest.mark.parametrize("order", [1, 5])
def test_unsupported_order(grid, order):
    with pytest.raises(UnsupportedOrder):
        quadrature_points(grid, order)


def test_locate_returns_local_coordinates(grid):
    cells, xi, tau = grid.locate(np.array([0.3, 1.0]), np.array([0.2, 0.5]))
    assert cells.tolist() == [grid.cell_index(1, 1), grid.cell_index(3, 3)]
    np.testing.assert_allclose(xi, [0.2, 1.0])
    np.testing.assert_allclose(tau, [0.6, 1.0])


def test_hermite_masks(grid):
    lateral = make_space(BasisKind.HERMITE_C1_TENSOR, grid)
    both = make_space(BasisKind.HERMITE_C1_TENSOR, grid, terminal=True)
    assert lateral.n_dofs == 4 * grid.n_nodes
    assert np.count_nonzero(lateral.constrained) == 4 * (grid.nt + 1)
    assert np.count_nonzero(both.constrained) == 4 * (grid.nt + 1) + 2 * grid.nx


def test_q1_and_p0_sizes(grid):
    q1 = make_space(BasisKind.BILINEAR_Q1, grid, terminal=True)
    p0 = make_space(BasisKind.PIECEWISE_CONSTANT_P0, grid)
    assert q1.n_free == (grid.nx - 1) * grid.nt
    assert p0.n_free == grid.n_cells


@settings(max_examples=30, deadline=None)
@given(x=unit, t=st.floats(min_value=0.0, max_value=0.5))
def test_hermite_reproduces_bicubics(x, t):
    grid = build_grid(0.0, 1.0, 0.5, 3, 2)
    space = make_space(BasisKind.HERMITE_C1_TENSOR, grid, dirichlet=False)
    values = interpolate(space, bicubic, bicubic_dx, bicubic_dt, bicubic_dxdt)
    for derivative, exact in [
        (Derivative.VALUE, bicubic),
        (Derivative.DX, bicubic_dx),
        (Derivative.DT, bicubic_dt),
        (Derivative.DXX, bicubic_dxx),
    ]:
        assert float(evaluate(space, values, x, t, derivative)) == pytest.approx(exact(x, t), abs=1e-10)


@settings(max_examples=20, deadline=None)
@given(tau=unit)
def test_hermite_slope_is_continuous_across_cells(tau):
    grid = build_grid(0.0, 1.0, 1.0, 2, 1)
    space = make_space(BasisKind.HERMITE_C1_TENSOR, grid, dirichlet=False)
    values = np.random.default_rng(7).normal(size=space.n_dofs)
    derivatives = (Derivative.VALUE, Derivative.DX)
    left = eval_basis(space, 0, (1.0, tau), derivatives)
    right = eval_basis(space, 1, (0.0, tau), derivatives)
    for derivative in derivatives:
        from_left = float(left[derivative][0] @ values[left.dofs])
        assert from_left == pytest.approx(float(right[derivative][0] @ values[right.dofs]))


def test_local_point_outside_reference_cell(grid):
    space = make_space(BasisKind.BILINEAR_Q1, grid)
    with pytest.raises(ValueError):
        eval_basis(space, 0, (1.5, 0.5))


@pytest.mark.parametrize(
    "kind, derivative",
    [(BasisKind.BILINEAR_Q1, Derivative.DXX), (BasisKind.PIECEWISE_CONSTANT_P0, Derivative.DX)],
)
def test_unsupported_derivative(grid, kind, derivative):
    space = make_space(kind, grid)
    with pytest.raises(UnsupportedDerivative):
        eval_basis(space, 0, (0.5, 0.5), (derivative,))


def test_q1_mass_matrix_sums_to_area(grid, quadrature):
    space = make_space(BasisKind.BILINEAR_Q1, grid, dirichlet=False)
    table = quadrature_tables(space, quadrature, (Derivative.VALUE,))[Derivative.VALUE]
    mass = assemble_symmetric(space, table, quadrature.w)
    assert mass.sum() == pytest.approx(grid.x_max * grid.T, rel=1e-13)
    assert assemble_linear(space, table, quadrature.w).sum() == pytest.approx(grid.x_max * grid.T, rel=1e-13)


def test_weighted_hermite_matrix_is_exactly_symmetric(grid, quadrature):
    space = make_space(BasisKind.HERMITE_C1_TENSOR, grid)
    tables = quadrature_tables(space, quadrature, (Derivative.DT, Derivative.DXX))
    operator = tables[Derivative.DT][None, :, :] - tables[Derivative.DXX][None, :, :] * (1.0 + quadrature.x[:, :, None])
    matrix = assemble_symmetric(space, operator, quadrature.w * np.exp(-quadrature.t))
    assert (matrix - matrix.T).count_nonzero() == 0
