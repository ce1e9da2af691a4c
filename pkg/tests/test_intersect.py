import numpy as np
import pytest

from parabolic_weingarten.intersect import (
    first_self_intersection, first_self_intersection_bruteforce, intersection_point, segments_intersect,
)


def test_simple_cross():
    pts = np.array([[0, 0], [2, 0], [2, 1], [1, -1]], float)
    assert first_self_intersection(pts) == (0, 2)
    assert intersection_point(pts, (0, 2)) == pytest.approx((1.5, 0.0))


def test_convex_polygon_open_has_no_crossing():
    t = np.linspace(0, 1.9 * np.pi, 200)
    assert first_self_intersection(np.column_stack([np.cos(t), np.sin(t)])) is None


def test_touching_endpoint_counts():
    pts = np.array([[0, 0], [1, 0], [1, 1], [0.5, 0]], float)
    assert first_self_intersection(pts) == first_self_intersection_bruteforce(pts) == (0, 2)


def test_segments_intersect_collinear():
    a = np.array([0.0, 0.0])
    assert segments_intersect(a, np.array([2.0, 0.0]), np.array([1.0, 0.0]), np.array([3.0, 0.0]))
    assert not segments_intersect(a, np.array([1.0, 0.0]), np.array([2.0, 0.0]), np.array([3.0, 0.0]))


@pytest.mark.parametrize("seed", range(40))
def test_hash_matches_bruteforce_random_walks(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 300))
    steps = rng.normal(size=(n, 2)) * rng.uniform(0.01, 3.0, size=(n, 1))
    pts = np.cumsum(steps, axis=0)
    assert first_self_intersection(pts) == first_self_intersection_bruteforce(pts)


@pytest.mark.parametrize("seed", range(10))
def test_hash_matches_bruteforce_spirals(seed):
    rng = np.random.default_rng(100 + seed)
    t = np.sort(rng.uniform(0, 20, 500))
    r = 1 + 0.1 * t + rng.normal(scale=0.02, size=t.size)
    pts = np.column_stack([r * np.cos(t), r * np.sin(t)])
    assert first_self_intersection(pts) == first_self_intersection_bruteforce(pts)


def test_bad_shape_rejected():
    with pytest.raises(ValueError):
        first_self_intersection(np.zeros((5, 3)))
    assert first_self_intersection(np.zeros((3, 2))) is None
