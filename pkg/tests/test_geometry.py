import numpy as np
import pytest
from hypothesis import given, strategies as st

from lejadisk.geometry import (
    PlanePoint,
    as_points,
    complex_product,
    inner,
    make_disk_grid,
    norm,
    perp,
    random_disk_points,
    to_complex,
)

coord = st.floats(-1e3, 1e3, allow_nan=False)
point = st.tuples(coord, coord)


def test_perp_examples():
    np.testing.assert_array_equal(perp([1.0, 0.0]), [0.0, 1.0])
    np.testing.assert_array_equal(perp([0.0, 1.0]), [-1.0, 0.0])


def test_perp_is_multiplication_by_i(rng):
    p = rng.standard_normal((50, 2))
    np.testing.assert_allclose(to_complex(perp(p)), 1j * to_complex(p))


def test_perp_orthogonal(rng):
    p = rng.standard_normal((50, 2))
    np.testing.assert_allclose(inner(perp(p), p), 0.0, atol=1e-14)


def test_inner_examples():
    assert inner([1, 0], [0, 1]) == 0.0
    assert inner([3, 4], [3, 4]) == 25.0
    assert norm([3, 4]) == 5.0


@given(point)
def test_perp_twice_is_negation(p):
    np.testing.assert_array_equal(perp(perp(p)), -np.asarray(p))


@given(point, point)
def test_perp_isometry(x, y):
    assert norm(perp(x)) == pytest.approx(norm(x), rel=1e-12, abs=1e-12)
    assert inner(perp(x), perp(y)) == pytest.approx(inner(x, y), rel=1e-9, abs=1e-9)


@given(point, point)
def test_complex_product_matches_real_formula(x, y):
    got = to_complex(complex_product(x, y))
    want = complex(*x) * complex(*y)
    assert got == pytest.approx(want, rel=1e-12, abs=1e-9)


def test_plane_point_roundtrip():
    p = PlanePoint.from_complex(2 - 3j)
    assert p == (2.0, -3.0)
    assert p.as_complex() == 2 - 3j
    np.testing.assert_array_equal(as_points(np.array([2 - 3j])), [[2.0, -3.0]])


def test_grid_minimal():
    g = make_disk_grid(1, 8)
    assert len(g) == 9
    np.testing.assert_array_equal(g.points[0], [0, 0])
    np.testing.assert_allclose(np.hypot(*g.boundary.T), 1.0)


def test_grid_contains_axis_points():
    g = make_disk_grid()
    pts = {tuple(p) for p in g.points}
    for p in [(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)]:
        assert p in pts


def test_grid_inside_disk():
    g = make_disk_grid(7, 33)
    assert np.all(np.hypot(g.x1, g.x2) <= 1 + 1e-12)
    assert len(g) == 1 + 7 * 33
    assert np.isclose(np.abs(g.z[-33:]), 1).all()


@pytest.mark.parametrize("radial, angular", [(0, 8), (2, 7), (1.5, 8)])
def test_grid_rejects_bad_parameters(radial, angular):
    with pytest.raises(ValueError):
        make_disk_grid(radial, angular)


def test_grid_points_read_only():
    g = make_disk_grid(2, 8)
    with pytest.raises(ValueError):
        g.points[0, 0] = 1.0


def test_random_disk_points(rng):
    p = random_disk_points(rng, 1000, radius=0.5)
    assert p.shape == (1000, 2)
    assert np.all(np.hypot(*p.T) <= 0.5)
