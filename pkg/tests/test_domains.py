import numpy as np
import pytest

from nonexp_fp.domains import (Ball, Box, HalfspaceIntersection, TriangleT,
                               domain_contains)

# the triangle as halfspaces: y <= 1/2 - |x| splits into two, plus the floor
TRI_AS_HALFSPACES = HalfspaceIntersection(
    normals=np.array([[1.0, 1.0], [-1.0, 1.0], [0.0, -1.0]]),
    offsets=np.array([0.5, 0.5, 0.5]))


def slsqp_projection(domain, x):
    """Independent projection oracle (constrained least squares)."""
    from scipy.optimize import minimize
    cons = [{"type": "ineq",
             "fun": lambda z, i=i: domain.offsets[i] - domain.normals[i] @ z}
            for i in range(domain.normals.shape[0])]
    res = minimize(lambda z: np.sum((z - x) ** 2), np.zeros(domain.dim),
                   constraints=cons, method="SLSQP",
                   options={"ftol": 1e-14, "maxiter": 500})
    return res.x


def test_triangle_membership_examples():
    tri = TriangleT()
    assert domain_contains(tri, [0.0, 0.0])
    assert not domain_contains(tri, [0.0, 0.6])
    assert domain_contains(tri, [0.5, 0.0])        # boundary point
    assert domain_contains(tri, [1.0, -0.5])       # corner
    assert not domain_contains(tri, [0.9, 0.0])


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError, match="dimension"):
        domain_contains(TriangleT(), [0.0, 0.0, 0.0])


def test_box_contains_and_projects():
    box = Box([-1.0, -2.0], [1.0, 2.0])
    assert box.contains([1.0, 2.0])
    assert not box.contains([1.1, 0.0])
    np.testing.assert_allclose(box.project([3.0, -5.0]), [1.0, -2.0])


def test_ball_projection_is_radial():
    ball = Ball([0.6, 0.8], 0.3)
    # projecting the origin onto a disk with unit-norm center gives (1-r)c
    np.testing.assert_allclose(ball.project([0.0, 0.0]), [0.42, 0.56],
                               atol=1e-15)
    inside = np.array([0.6, 0.7])
    np.testing.assert_allclose(ball.project(inside), inside)


def test_ball_sampler_uniform_inside(rng):
    ball = Ball([1.0, -1.0], 0.5)
    pts = ball.sample(2000, rng)
    assert np.all(ball.contains_batch(pts))
    # radius distribution sanity: median radius of a uniform disk is r/sqrt(2)
    rad = np.linalg.norm(pts - ball.center, axis=1)
    assert abs(np.median(rad) - 0.5 / np.sqrt(2)) < 0.02


def test_triangle_projection_against_halfspace_route(rng):
    tri = TriangleT()
    pts = rng.uniform(-2.0, 2.0, size=(200, 2))
    got = tri.project_batch(pts)
    want = TRI_AS_HALFSPACES.project_batch(pts)
    np.testing.assert_allclose(got, want, atol=1e-9)
    assert np.all(tri.contains_batch(got))


def test_halfspace_projection_matches_slsqp(rng):
    pts = rng.uniform(-3.0, 3.0, size=(25, 2))
    for x in pts:
        got = TRI_AS_HALFSPACES._project_one(x)
        want = slsqp_projection(TRI_AS_HALFSPACES, x)
        np.testing.assert_allclose(got, want, atol=1e-6)


def test_halfspace_bounding_box_from_lps():
    lo, hi = TRI_AS_HALFSPACES.bounding_box()
    np.testing.assert_allclose(lo, [-1.0, -0.5], atol=1e-9)
    np.testing.assert_allclose(hi, [1.0, 0.5], atol=1e-9)


def test_halfspace_unbounded_rejected():
    with pytest.raises(ValueError, match="unbounded"):
        HalfspaceIntersection(normals=np.array([[1.0, 0.0]]),
                              offsets=np.array([1.0]))


def test_halfspace_empty_rejected():
    with pytest.raises(ValueError, match="empty|unbounded"):
        HalfspaceIntersection(
            normals=np.array([[1.0, 0.0], [-1.0, 0.0],
                              [0.0, 1.0], [0.0, -1.0]]),
            offsets=np.array([-2.0, 1.0, 1.0, 1.0]))


def test_box_needs_ordered_bounds():
    with pytest.raises(ValueError):
        Box([1.0, 0.0], [0.0, 1.0])


def test_domain_samples_are_members(rng):
    for dom in (Box([-1.0, -0.5], [1.0, 0.5]), Ball([0.0, 0.0], 1.0),
                TriangleT(), TRI_AS_HALFSPACES):
        pts = dom.sample(500, rng)
        assert pts.shape == (500, dom.dim)
        assert np.all(dom.contains_batch(pts))
