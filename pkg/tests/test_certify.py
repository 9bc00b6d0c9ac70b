import numpy as np
import pytest

from halpern.certify import (MissingFixedSet, certify_ImS_inequality,
                             certify_inverse_strongly_monotone, certify_nonexpansive,
                             certify_nonspreading, certify_quasi_firmly,
                             certify_quasi_nonexpansive, estimate_firmly_coefficient)
from halpern.operators import (averaged, identity_operator, make_affine_operator,
                               make_projection_operator, make_rotation_operator)
from halpern.sets import Ball, Box, Halfspace

TOL = 1e-10
N = 10**4


def projections(d):
    dom = Box(np.full(d, -3.0), np.full(d, 3.0))
    return [
        make_projection_operator(Ball(np.full(d, 0.5), 1.0), dom),
        make_projection_operator(Box(np.zeros(d), np.ones(d)), dom),
    ]


def _halfspace_operator(d):
    # Halfspace targets are unbounded, so the domain must be the whole space;
    # sample from a finite extent instead.
    from halpern.sets import WholeSpace
    return make_projection_operator(Halfspace(np.arange(1.0, d + 1), 0.5), WholeSpace(d))


@pytest.fixture(scope="module")
def expansive():
    return make_affine_operator(2 * np.eye(2), np.zeros(2), Ball(np.zeros(2), 1))


@pytest.mark.parametrize("d", [2, 10])
def test_projection_passes_everything(d):
    for P in projections(d) + [_halfspace_operator(d)]:
        kw = {"extent": 3.0}
        assert certify_nonexpansive(P, N, 1, **kw).passed(TOL)
        rd, rc, gap = certify_nonspreading(P, N, 2, **kw)
        assert rd.passed(TOL) and rc.passed(TOL) and gap <= TOL
        assert certify_quasi_nonexpansive(P, N, 3, **kw).passed(TOL)
        assert certify_inverse_strongly_monotone(P, N, 4, **kw).passed(TOL)
        assert certify_ImS_inequality(P, N, 5, **kw).passed(TOL)


def test_identity_cases():
    I = identity_operator(Box(-np.ones(3), np.ones(3)))
    rd, rc, gap = certify_nonspreading(I, 2000, 0)
    assert rd.scaled_violation <= 1e-15 and rc.scaled_violation <= 1e-15
    rep = certify_inverse_strongly_monotone(I, 2000, 0)
    assert rep.max_violation == 0
    assert certify_ImS_inequality(I, 2000, 0).max_violation == 0
    fc = estimate_firmly_coefficient(I, 2000, 0)
    assert not fc.applicable
    assert fc.passed()
    a, b = certify_quasi_firmly(averaged(I, 0.5), 2000, 0)
    assert abs(a.max_violation) <= 1e-14 and abs(b.max_violation) <= 1e-14


def test_rotation_isometry():
    R = make_rotation_operator(np.pi / 2, Ball(np.zeros(2), 2))
    rep = certify_nonexpansive(R, N, 0)
    assert rep.passed(TOL)
    assert rep.max_violation > -1e-12  # equality for an isometry
    assert certify_inverse_strongly_monotone(R, N, 1).passed(TOL)
    q = certify_quasi_nonexpansive(R, N, 2)
    assert q.passed(TOL)


def test_expansive_map_is_caught(expansive):
    rep = certify_nonexpansive(expansive, N, 0)
    assert not rep.passed(TOL)
    x, y = rep.worst_pair
    v = np.linalg.norm(expansive(x) - expansive(y)) - np.linalg.norm(x - y)
    assert v == pytest.approx(rep.max_violation)
    # pairs inside the half-radius disc are doubled exactly: violation = ||x - y||
    if max(np.linalg.norm(x), np.linalg.norm(y)) <= 0.5:
        assert rep.max_violation == pytest.approx(np.linalg.norm(x - y))
    rd, rc, gap = certify_nonspreading(expansive, N, 1)
    assert rd.max_violation > 0.1 and rc.max_violation > 0.1
    assert gap <= TOL
    assert estimate_firmly_coefficient(expansive, N, 2).estimated_coefficient < 0


def test_equivalence_gap_for_arbitrary_maps(rng):
    dom = Ball(np.zeros(3), 1)
    for seed in range(5):
        M = rng.normal(size=(3, 3))
        T = make_affine_operator(M, rng.normal(size=3), dom)
        assert certify_nonspreading(T, 3000, seed)[2] <= TOL


def test_quasi_nonexpansive_needs_fixed_set(expansive):
    with pytest.raises(MissingFixedSet):
        certify_quasi_nonexpansive(expansive, 10, 0)
    with pytest.raises(MissingFixedSet):
        certify_quasi_firmly(averaged(expansive, 0.5), 10, 0)


@pytest.mark.parametrize("delta", [0.1, 0.5, 0.9])
def test_averaged_projection(delta):
    for P in projections(3):
        A = averaged(P, delta)
        assert certify_nonexpansive(A, N, 0).passed(TOL)
        assert certify_quasi_nonexpansive(A, N, 1).passed(TOL)
        a, b = certify_quasi_firmly(A, N, 2)
        assert a.passed(TOL) and b.passed(TOL)
        assert f"{delta:g}" in a.inequality_id


def test_firmly_coefficient_projection():
    for P in projections(3) + [_halfspace_operator(3)]:
        rep = estimate_firmly_coefficient(P, N, 0, extent=3.0)
        assert rep.applicable
        assert rep.estimated_coefficient >= 1 - 1e-6
        assert rep.coefficient_bounded_away


@pytest.mark.parametrize("delta", [0.1, 0.5, 0.9])
def test_firmly_coefficient_averaged_projection(delta):
    # With e = (I-P)x - (I-P)y and d = x - y, firm nonexpansiveness of I-P gives
    # <d, e> >= ||e||^2, hence the ratio is >= (2 - delta)/delta, with equality
    # whenever Px = Py (both points map to the same corner of the box).
    P = projections(3)[1]
    rep = estimate_firmly_coefficient(averaged(P, delta), N, 0)
    bound = (2 - delta) / delta
    assert rep.estimated_coefficient >= bound * (1 - 1e-9)
    assert rep.estimated_coefficient >= (1 - delta) / delta
    assert rep.estimated_coefficient == pytest.approx(bound, rel=1e-6)


def test_determinism_and_sharding():
    P = projections(3)[0]
    a = certify_nonspreading(P, 5000, 42)
    b = certify_nonspreading(P, 5000, 42, workers=3)
    for ra, rb in zip(a[:2], b[:2]):
        assert ra.max_violation == rb.max_violation
        np.testing.assert_array_equal(ra.worst_pair[0], rb.worst_pair[0])
    assert a[2] == b[2]
    c = certify_nonexpansive(P, 5000, 43)
    assert not np.array_equal(c.worst_pair[0], certify_nonexpansive(P, 5000, 44).worst_pair[0])
    np.testing.assert_array_equal(c.worst_pair[0], certify_nonexpansive(P, 5000, 43).worst_pair[0])


def test_sample_count_validation():
    P = projections(2)[0]
    with pytest.raises(ValueError):
        certify_nonexpansive(P, 0, 0)
