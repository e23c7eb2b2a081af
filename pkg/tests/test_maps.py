import math

import numpy as np
import pytest

from nonexp_fp.domains import Ball, Box
from nonexp_fp.geometry import NormSpec
from nonexp_fp.maps import (AbsAffineProfile, AffineMap, CompositionMap,
                            ConvexCombinationMap, CoordClampMap,
                            EuclideanProjectionMap, GraphProjectionMap,
                            OscillatingShearMap, ShearProfile,
                            calibrate_amplitude, gap_from_height,
                            height_from_gap, lipschitz_estimate,
                            log_oscillation, map_eval)


def gap_by_bisection(alpha, mu, iters=200):
    """Brute-force inverse of height_from_gap on [0, 1]."""
    lo, hi = 0.0, 1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if height_from_gap(alpha, mid) < mu:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def sign_flipped_inverse(alpha, mu):
    """The rejected algebraic variant with the opposite denominator sign."""
    return (alpha - 1.0) * (1.0 + 2.0 * mu) / (alpha - 1.0 - 2.0 * alpha * mu)


# ---------------------------------------------------------------------------
# gap <-> height machinery
# ---------------------------------------------------------------------------

def test_height_endpoints():
    for alpha in (0.25, 0.5, 0.75):
        assert height_from_gap(alpha, 0.0) == pytest.approx(-0.5, abs=1e-15)
        assert height_from_gap(alpha, 1.0) == 0.0


def test_height_midpoint_value():
    assert height_from_gap(0.5, 0.5) == pytest.approx(-1.0 / 6.0, abs=1e-15)


def test_gap_inverse_matches_bisection_oracle():
    for alpha in (0.25, 0.5, 0.75):
        for mu in np.linspace(-0.499, -0.001, 25):
            assert gap_from_height(alpha, mu) == pytest.approx(
                gap_by_bisection(alpha, mu), abs=1e-10)
    assert gap_from_height(0.5, -1.0 / 6.0) == pytest.approx(0.5, abs=1e-12)


@pytest.mark.parametrize("alpha", [0.25, 0.5, 0.75])
def test_gap_height_roundtrip_1e3_grid(alpha):
    t = np.linspace(0.0, 1.0, 1000)
    back = gap_from_height(alpha, height_from_gap(alpha, t))
    assert np.max(np.abs(back - t)) <= 1e-10


def test_height_is_strictly_increasing():
    t = np.linspace(0.0, 1.0, 2000)
    for alpha in (0.25, 0.5, 0.75):
        vals = height_from_gap(alpha, t)
        assert np.all(np.diff(vals) > 0.0)


def test_sign_flipped_inverse_variant_fails_roundtrip():
    # the denominator sign matters: the flipped variant is not an inverse
    # (height -1/6 must invert to gap 1/2 at alpha = 1/2; it returns 1)
    assert sign_flipped_inverse(0.5, -1.0 / 6.0) == pytest.approx(1.0)
    t = np.linspace(0.05, 0.95, 200)
    mu = height_from_gap(0.5, t)
    err = np.abs(sign_flipped_inverse(0.5, mu) - t)
    assert np.max(err) > 0.5


def test_range_validation():
    with pytest.raises(ValueError):
        height_from_gap(0.5, 1.5)
    with pytest.raises(ValueError):
        gap_from_height(0.5, 0.2)
    with pytest.raises(ValueError):
        height_from_gap(1.5, 0.5)


# ---------------------------------------------------------------------------
# shear amplitude profile
# ---------------------------------------------------------------------------

def test_profile_vanishes_at_bottom_and_center():
    prof = ShearProfile(alpha=0.5, eps0=0.05)
    assert prof.epsilon(-0.5) == 0.0
    assert prof.epsilon(0.0) == 0.0      # log_oscillation(1) = sin(0) = 0
    assert prof.epsilon(0.3) == 0.0      # constant extension above 0


def test_profile_roundtrip_identity():
    # eps(height_from_gap(t)) = eps0 * t * sin(ln t)
    prof = ShearProfile(alpha=0.5, eps0=0.05)
    for t in np.linspace(0.01, 1.0, 50):
        mu = height_from_gap(0.5, t)
        assert prof.epsilon(mu) == pytest.approx(
            0.05 * log_oscillation(t), abs=1e-14)


def test_calibration_floor_and_envelope():
    # |d log_oscillation| <= sqrt(2) and the gap derivative is <= 4 at
    # alpha = 1/2, so the calibrated amplitude is at least
    # 0.9 * 0.5 / (4 sqrt(2))
    eps0 = calibrate_amplitude(0.5, safety=0.9)
    assert eps0 >= 0.9 * 0.5 / (4.0 * math.sqrt(2.0))
    assert eps0 > 0.0
    prof = ShearProfile(alpha=0.5, eps0=eps0)
    ys = np.linspace(-0.5, 0.5, 10_000)
    vals = prof.epsilon(ys)
    assert np.all(np.abs(vals) <= 0.5 * (ys + 0.5) + 1e-12)


def test_calibration_positive_for_any_alpha():
    for alpha in (0.1, 0.33, 0.66, 0.9):
        assert calibrate_amplitude(alpha) > 0.0


def test_oversized_amplitude_rejected():
    with pytest.raises(ValueError, match="Lipschitz"):
        ShearProfile(alpha=0.5, eps0=1.0)


def test_profile_height_range_checked():
    prof = ShearProfile(alpha=0.5, eps0=0.05)
    with pytest.raises(ValueError):
        prof.epsilon(0.7)


# ---------------------------------------------------------------------------
# map evaluation
# ---------------------------------------------------------------------------

def test_shear_fixes_bottom_edge(shear):
    m, _ = shear
    for x in np.linspace(-1.0, 1.0, 9):
        np.testing.assert_allclose(map_eval(m, [x, -0.5]), [x, -0.5],
                                   atol=1e-15)


def test_shear_self_maps_triangle_10k(shear):
    m, _ = shear
    rng = np.random.default_rng(99)
    X = m.domain.sample(10_000, rng)
    assert np.all(m.domain.contains_batch(m.eval_batch(X)))


def test_graph_map_example_point(graph):
    m, _ = graph
    np.testing.assert_allclose(map_eval(m, [0.5, -0.2]), [0.5, 0.5],
                               atol=1e-15)


def test_graph_map_is_idempotent(graph):
    m, _ = graph
    rng = np.random.default_rng(3)
    X = m.domain.sample(500, rng)
    np.testing.assert_allclose(m.eval_batch(m.eval_batch(X)),
                               m.eval_batch(X), atol=0.0)


def test_disk_projection_of_origin(disk):
    m, _ = disk
    np.testing.assert_allclose(map_eval(m, [0.0, 0.0]), [0.42, 0.56],
                               atol=1e-15)


def test_eval_outside_domain_rejected(shear):
    m, _ = shear
    with pytest.raises(ValueError, match="outside"):
        map_eval(m, [0.0, 0.6])


def test_map_domain_must_contain_origin():
    with pytest.raises(ValueError, match="origin"):
        CoordClampMap(lo=[2.0, 2.0], hi=[3.0, 3.0],
                      domain=Box([1.5, 1.5], [4.0, 4.0]))


def test_affine_operator_norm_enforced():
    with pytest.raises(ValueError, match="operator norm"):
        AffineMap(matrix=np.array([[1.2, 0.0], [0.0, 0.5]]),
                  offset=np.zeros(2), domain=Ball([0.0, 0.0], 1.0))


def test_profile_slope_budget_enforced():
    with pytest.raises(ValueError, match="slope"):
        AbsAffineProfile(offset=0.0, slope=0.6)
    with pytest.raises(ValueError, match="Lipschitz"):
        GraphProjectionMap(lambda x: 0.8 * x)


def test_graph_map_with_flat_zero_profile():
    # degenerate bound M = 0 collapses the domain to a segment
    m = GraphProjectionMap(AbsAffineProfile(offset=0.0, slope=0.0))
    assert m.domain.contains([0.5, 0.0])
    assert not m.domain.contains([0.5, 0.1])
    np.testing.assert_allclose(map_eval(m, [0.5, 0.0]), [0.5, 0.0])


def test_callable_profile_supported():
    m = GraphProjectionMap(lambda x: 0.25 * math.cos(2 * x))
    y = map_eval(m, [0.5, 0.0])
    assert y[1] == pytest.approx(0.25 * math.cos(1.0))


# ---------------------------------------------------------------------------
# Lipschitz certificates
# ---------------------------------------------------------------------------

def test_identity_and_constant_lipschitz():
    dom = Box([-1.0, -1.0], [1.0, 1.0])
    ident = AffineMap(matrix=np.eye(2), offset=np.zeros(2), domain=dom)
    const = AffineMap(matrix=np.zeros((2, 2)), offset=np.array([0.3, 0.1]),
                      domain=dom)
    assert lipschitz_estimate(ident, NormSpec.euclidean(), 2000, seed=1) == \
        pytest.approx(1.0, abs=1e-12)
    assert lipschitz_estimate(const, NormSpec.euclidean(), 2000, seed=1) == 0.0


def test_graph_map_nonexpansive_sup_norm(graph):
    m, _ = graph
    assert lipschitz_estimate(m, NormSpec.linf(), 10_000, seed=2) <= 1.0 + 1e-12


def test_builtins_nonexpansive_under_declared_norms(builtins):
    for m, man in builtins:
        for norm in man.norms_1lip:
            est = lipschitz_estimate(m, norm, 10_000, seed=7)
            assert est <= 1.0 + 1e-9, (man.name, norm.label(), est)


def test_composition_and_convex_combination_nonexpansive(clamp):
    m, _ = clamp
    dom = m.domain
    rot = AffineMap(matrix=np.array([[0.0, -1.0], [1.0, 0.0]]),
                    offset=np.zeros(2), domain=Ball([0.0, 0.0], 1.5))
    comp = CompositionMap(parts=(m, m), domain=dom)
    mix = ConvexCombinationMap(weights=[0.25, 0.75], parts=(m, comp),
                               domain=dom)
    for mm in (comp, mix):
        assert lipschitz_estimate(mm, NormSpec.euclidean(), 10_000, seed=8) \
            <= 1.0 + 1e-9
    assert lipschitz_estimate(rot, NormSpec.euclidean(), 5000, seed=8) == \
        pytest.approx(1.0, abs=1e-9)


def test_convex_combination_weight_validation(clamp):
    m, _ = clamp
    with pytest.raises(ValueError, match="weight"):
        ConvexCombinationMap(weights=[0.5, 0.6], parts=(m, m))


def test_analytic_fixed_point_samplers(builtins, rng):
    for m, man in builtins:
        pts = m.analytic_fixed_points(64, rng)
        if pts is None:
            continue
        res = np.linalg.norm(m.eval_batch(pts) - pts, axis=1)
        assert np.max(res) <= 1e-12, man.name
