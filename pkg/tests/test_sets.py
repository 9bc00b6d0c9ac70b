import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from halpern.sets import (Ball, Box, Halfspace, SamplerUnavailable, WholeSpace, contains,
                          intersect, intersects, project, projection_characterization_check,
                          set_from_spec)
from halpern.space import DimensionError

SETS = [
    Ball(np.zeros(3), 1.0),
    Ball(np.array([1.0, -2.0, 0.5]), 0.3),
    Box(np.array([0.0, -1.0, 2.0]), np.array([1.0, 0.0, 2.0])),
    Halfspace(np.array([1.0, 2.0, -1.0]), 0.7),
    WholeSpace(3),
]


def test_contains_examples():
    assert contains(Ball(np.zeros(2), 1), [0.5, 0], 0)
    # distance from (2, 0) to the unit square is 1
    assert not contains(Box([0, 0], [1, 1]), [2, 0], 0.5)
    assert contains(Box([0, 0], [1, 1]), [2, 0], 1.0)
    assert contains(Halfspace([1, 0], 0), [0, 0], 0)
    with pytest.raises(DimensionError):
        contains(Ball(np.zeros(2), 1), [0, 0, 0], 0)


def test_project_examples():
    np.testing.assert_allclose(project(Ball(np.zeros(2), 1), [2, 0]), [1, 0])
    np.testing.assert_array_equal(project(Box([0, 0], [1, 1]), [2, -1]), [1, 0])
    np.testing.assert_allclose(project(Halfspace([0, 1], 0), [3, 2]), [3, 0])
    np.testing.assert_array_equal(project(Ball(np.ones(2), 2), [1, 1]), [1, 1])


def test_invalid_parameters():
    with pytest.raises(ValueError):
        Ball(np.zeros(2), 0.0)
    with pytest.raises(ValueError):
        Box([1, 0], [0, 1])
    with pytest.raises(ValueError):
        Halfspace([0, 0], 1)


def test_characterization_examples():
    ball = Ball(np.zeros(2), 1)
    assert projection_characterization_check(ball, [0.2, 0.3], 500) == 0
    assert projection_characterization_check(Box([0, 0], [1, 1]), [2, 2], 1000, 1) <= 1e-10
    assert projection_characterization_check(Halfspace([1, 0], 0), [1, 1], 1000, 2) <= 1e-10
    with pytest.raises(SamplerUnavailable):
        projection_characterization_check(WholeSpace(2), [1, 1], 10)
    assert projection_characterization_check(WholeSpace(2), [1, 1], 10, extent=3.0) == 0


@pytest.mark.parametrize("s", SETS[:4])
def test_samples_lie_in_set(s, rng):
    pts = s.sample(rng, 2000)
    assert pts.shape == (2000, 3)
    assert s.contains(pts, 1e-12)


def test_halfspace_sampler_spreads_around_boundary(rng):
    h = Halfspace(np.array([0.0, 1.0]), 1.0)
    pts = h.sample(rng, 5000, extent=2.0)
    assert pts[:, 1].max() <= 1.0
    assert pts[:, 1].min() >= -1.0 - 1e-12
    assert np.ptp(pts[:, 0]) > 3.5


@pytest.mark.parametrize("s", SETS)
def test_projection_invariants_sampled(s, rng):
    X = rng.normal(scale=3, size=(3000, 3))
    Y = rng.normal(scale=3, size=(3000, 3))
    PX, PY = s.project(X), s.project(Y)
    scale = 1 + np.sum(X * X, 1) + np.sum(Y * Y, 1)
    # idempotence
    assert np.all(np.linalg.norm(s.project(PX) - PX, axis=1) <= 1e-12 * (1 + np.linalg.norm(X, axis=1)))
    # membership
    assert s.contains(PX, 1e-12)
    # firm nonexpansiveness
    lhs = np.sum((PX - PY) ** 2, 1)
    rhs = np.sum((X - Y) * (PX - PY), 1)
    assert np.all(lhs <= rhs + 1e-10 * scale)
    # distance optimality against points of the set
    if s.kind != 0:
        Z = s.sample(rng, 3000)
        assert np.all(np.linalg.norm(X - PX, axis=1)
                      <= np.linalg.norm(X - Z, axis=1) + 1e-12 * scale)


@settings(max_examples=150)
@given(arrays(np.float64, 3, elements=st.floats(-50, 50)))
def test_projection_characterization_property(x):
    for i, s in enumerate(SETS[:4]):
        assert projection_characterization_check(s, x, 200, i) <= 1e-10 * (1 + x @ x)


def test_box_intersection():
    a = Box(np.zeros(3), np.ones(3))
    b = Box(np.full(3, 0.5), np.full(3, 1.5))
    c = intersect(a, b)
    np.testing.assert_array_equal(c.lower, [0.5] * 3)
    np.testing.assert_array_equal(c.upper, [1.0] * 3)
    assert intersect(a, Box(np.full(3, 2.0), np.full(3, 3.0))) is None
    assert intersect(a, WholeSpace(3)) is a
    with pytest.raises(NotImplementedError):
        intersect(a, Ball(np.zeros(3), 1))


def test_intersects_decisions():
    ball = Ball(np.zeros(2), 1)
    assert intersects(ball, Ball(np.array([1.5, 0]), 0.6))
    assert not intersects(ball, Ball(np.array([3.0, 0]), 0.6))
    assert intersects(ball, Box([0.5, 0.5], [2, 2]))
    assert not intersects(ball, Box([1, 1], [2, 2]))  # corner at distance sqrt(2)
    assert intersects(Box([0, 0], [1, 1]), Halfspace([1, 1], 0))
    assert not intersects(Box([0, 0], [1, 1]), Halfspace([1, 1], -0.1))
    assert not intersects(Halfspace([1, 0], 0), Halfspace([-2, 0], -2))  # x<=0 and x>=1
    assert intersects(Halfspace([1, 0], 1), Halfspace([-2, 0], -2))
    assert intersects(Halfspace([1, 0], 0), Halfspace([0, 1], 0))


def test_spec_roundtrip():
    for s in SETS:
        spec = s.to_spec()
        t = set_from_spec(spec, 3)
        assert t.same_as(s)
    with pytest.raises(ValueError):
        set_from_spec({"kind": "box", "lower": [0], "upper": [1], "junk": 1})
    with pytest.raises(ValueError):
        set_from_spec({"kind": "cone"})
