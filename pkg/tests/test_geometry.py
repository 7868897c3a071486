import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from swarmcluster.geometry import convex_hull, point_in_hull, shoelace_area


def test_square_with_centre():
    h = convex_hull([[0, 0], [1, 0], [1, 1], [0, 1], [0.5, 0.5]])
    assert h.vertices.tolist() == [[0, 0], [1, 0], [1, 1], [0, 1]]
    assert h.area == 1.0


def test_collinear_points():
    h = convex_hull([[i, 2 * i] for i in range(5)])
    assert h.vertices.tolist() == [[0, 0], [4, 8]]
    assert h.area == 0.0


def test_single_point():
    h = convex_hull([[3, 3], [3, 3]])
    assert h.vertices.tolist() == [[3, 3]] and h.area == 0.0


def test_collinear_boundary_points_dropped():
    h = convex_hull([[0, 0], [1, 0], [2, 0], [2, 2], [0, 2]])
    assert len(h.vertices) == 4


def test_starts_lowest_x_then_lowest_y_and_is_ccw():
    pts = np.random.default_rng(0).normal(size=(50, 2))
    v = convex_hull(pts).vertices
    assert tuple(v[0]) == min(map(tuple, pts))
    x, y = v[:, 0], v[:, 1]
    assert np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)) > 0


def test_rejects_3d():
    with pytest.raises(ValueError):
        convex_hull(np.zeros((4, 3)))


def test_matches_edge_test_oracle():
    pts = np.random.default_rng(7).uniform(0, 10, size=(200, 2))
    h = convex_hull(pts)
    assert set(map(tuple, h.vertices.tolist())) == oracles.hull_vertex_set(pts.tolist())


def test_shoelace():
    assert shoelace_area(np.array([[0, 0], [4, 0], [0, 3]])) == 6.0


points = st.lists(
    st.tuples(st.integers(-20, 20), st.integers(-20, 20)), min_size=1, max_size=40
)


@given(points)
def test_contains_every_input_point(pts):
    h = convex_hull(pts)
    assert all(point_in_hull(h, p) for p in pts)
    assert all(h.contains(p) for p in h.vertices)


@given(points)
def test_idempotent(pts):
    h = convex_hull(pts)
    again = convex_hull(h.vertices)
    assert np.array_equal(again.vertices, h.vertices)
    assert again.area == pytest.approx(h.area)


@given(points)
def test_strictly_convex(pts):
    v = convex_hull(pts).vertices
    if len(v) >= 3:
        for i in range(len(v)):
            a, b, c = v[i - 1], v[i], v[(i + 1) % len(v)]
            assert (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) > 0


def test_outside_point():
    h = convex_hull([[0, 0], [1, 0], [1, 1], [0, 1]])
    assert not point_in_hull(h, (1.5, 0.5))
