"""Acceptance suite: one test per criterion, one printed line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the PASS/FAIL lines.
"""

import functools
import time

import numpy as np
import pytest

import nonexp_fp as nfp
from nonexp_fp.geometry import duality_batch, norm_value, norm_value_batch

EUCLID = nfp.NormSpec.euclidean()
P4 = nfp.NormSpec.pnorm(4.0)
ROUNDED = nfp.NormSpec.rounded_linf(0.5)


def criterion(label):
    def deco(fn):
        @functools.wraps(fn)
        def wrapper(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                print(f"[acceptance] {label}: FAIL")
                raise
            print(f"[acceptance] {label}: PASS")
        return wrapper
    return deco


@criterion("01 oscillating-shear path matches closed form")
def test_c1_shear_path_closed_form(shear):
    m, man = shear
    eps0 = man.divergence_floor / 1.5
    t0 = time.perf_counter()
    traj = nfp.continuation(m, nfp.LogSpacedSchedule(0.5, 8.0, 0.25),
                            tol=1e-9, norm=nfp.NormSpec.l1())
    elapsed = time.perf_counter() - t0
    lams = traj.lambdas()
    xs = traj.xs()
    want = np.column_stack([eps0 * np.sin(np.log(1.0 - lams)),
                            (0.5 - 1.0) / (2.0 * (1.0 - 0.5 * lams))])
    assert xs.shape == (31, 2)
    assert np.max(np.abs(xs - want)) <= 1e-6
    assert elapsed < 10.0


@criterion("02 divergence certified while every solve meets its bound")
def test_c2_divergence_certified(shear):
    m, man = shear
    eps0 = man.divergence_floor / 1.5
    traj = nfp.continuation(m, nfp.LogSpacedSchedule(0.5, 8.0, 0.25),
                            tol=1e-9, norm=nfp.NormSpec.l1())
    rep = nfp.detect_divergence(traj, tail_fraction=0.6)
    assert rep.tail_diameter >= 1.5 * eps0
    for r in traj.reports:
        assert r.residual <= 1e-9 * (1.0 - r.lam)


@criterion("03 Euclidean limit is the projection of the anchor onto Fix(f)")
def test_c3_disk_limit_projection(disk):
    m, _ = disk
    traj = nfp.continuation(m, nfp.GeometricSchedule(rho=0.5, k_max=20),
                            tol=1e-9)
    terminal = traj.reports[-1].y
    assert np.linalg.norm(terminal - [0.42, 0.56]) <= 1e-5
    fix = nfp.sample_fixed_points(m, n_starts=1000, seed=4242)
    dists = np.linalg.norm(fix.points, axis=1)
    assert np.linalg.norm(terminal) <= dists.min() + 1e-5


@criterion("04 norm growth: strict for the disk, zero when f(0) = 0")
def test_c4_norm_growth(disk, rotation):
    m, _ = disk
    traj = nfp.continuation(m, nfp.GeometricSchedule(rho=0.5, k_max=20),
                            tol=1e-9)
    norms = np.linalg.norm(traj.ys(), axis=1)
    assert np.max(np.abs(norms - 0.7 * traj.lambdas())) <= 2e-9
    assert np.all(np.diff(norms) > 0.0)
    assert nfp.check_norm_monotone(traj).passed
    mz, _ = rotation
    tz = nfp.continuation(mz, nfp.GeometricSchedule(rho=0.5, k_max=20))
    assert np.max(np.abs(np.linalg.norm(tz.ys(), axis=1))) == 0.0


@criterion("05 monotonicity brackets scoped by the nonexpansive norm")
def test_c5_monotonicity(builtins):
    for m, man in builtins:
        rep = nfp.check_monotone(m, n_pairs=10_000, seed=505, tol=1e-9)
        if man.euclidean_nonexpansive:
            assert rep.passed, man.name
        else:
            # the counterexample maps must actually violate the bracket
            assert not rep.passed and rep.worst_value < -1e-3, man.name
        labels = [n.label() for n in man.norms_1lip]
        for norm in (EUCLID, P4):
            if norm.label() in labels:
                drep = nfp.check_duality_monotone(m, norm, n_pairs=10_000,
                                                  seed=506, tol=1e-9)
                assert drep.passed, (man.name, norm.label())


@criterion("06 variational characterization and uniqueness (clamp, p-norm 4)")
def test_c6_variational_limit(clamp):
    m, _ = clamp
    traj = nfp.continuation(m, nfp.GeometricSchedule(rho=0.5, k_max=20),
                            tol=1e-9, norm=P4)
    terminal = traj.reports[-1].y
    assert np.linalg.norm(terminal - [0.2, 0.0]) <= 1e-6
    fix = nfp.sample_fixed_points(m, n_starts=1000, seed=606)
    refined = nfp.refine_fixed_point(m, terminal)
    fix = nfp.extend_sample(fix, refined, m)
    vi = nfp.check_variational_limit(terminal, fix, P4, tol=1e-8)
    assert vi.passed
    uq = nfp.uniqueness_probe(fix, P4, tol=1e-8)
    assert uq.passed and uq.worst_value == 1.0


@criterion("07 retraction: clamp values, nonexpansive, identity on Fix")
def test_c7_retraction(clamp):
    m, _ = clamp
    anchors = nfp.grid_anchors(m.domain, (21, 21))
    assert anchors.shape == (441, 2)
    pairs = nfp.retraction_grid(m, anchors,
                                nfp.GeometricSchedule(rho=0.5, k_max=24),
                                tol=1e-9)
    A = np.array([a for a, _ in pairs])
    Y = np.array([y for _, y in pairs])
    np.testing.assert_allclose(Y, np.clip(A, [0.2, -0.5], [0.8, 0.5]),
                               atol=1e-6)
    iu, ju = np.triu_indices(len(A), k=1)
    for norm in (EUCLID, P4):
        da = norm_value_batch(norm, A[iu] - A[ju])
        dy = norm_value_batch(norm, Y[iu] - Y[ju])
        assert np.max(dy / da) <= 1.0 + 1e-6
    fixed = np.all((A >= [0.2, -0.5]) & (A <= [0.8, 0.5]), axis=1)
    assert fixed.any()
    np.testing.assert_allclose(Y[fixed], A[fixed], atol=1e-12)


@criterion("08 graph projection: scaled fixed points, non-convex Fix, "
           "nonexpansive in both sup-type norms")
def test_c8_graph_projection(graph):
    m, _ = graph
    for lam in (0.5, 0.9, 0.99):
        rep = nfp.solve_lambda(m, lam, tol=1e-9)
        assert np.linalg.norm(rep.y - [0.0, 0.3 * lam]) <= 1e-9
    fix = nfp.sample_fixed_points(m, n_starts=1000, seed=808)
    conv = nfp.convexity_probe(fix, m, n_midpoints=1000, seed=809)
    assert not conv.passed and conv.worst_value >= 0.39
    assert nfp.lipschitz_estimate(m, nfp.NormSpec.linf(), 10_000,
                                  seed=810) <= 1.0 + 1e-9
    assert nfp.lipschitz_estimate(m, ROUNDED, 10_000, seed=810) <= 1.0 + 1e-9


@criterion("09 norm geometry: gradients, gauge laws, flat face")
def test_c9_geometry():
    rng = np.random.default_rng(909)
    for spec in (EUCLID, P4, ROUNDED):
        X = rng.uniform(-1.5, 1.5, size=(1200, 2))
        X = X[norm_value_batch(spec, X) > 1e-2][:1000]
        assert X.shape[0] == 1000
        L = duality_batch(spec, X)
        for x, ell in zip(X, L):
            h = 1e-6 * float(np.linalg.norm(x))
            fd = np.array([
                (norm_value(spec, x + [h, 0]) - norm_value(spec, x - [h, 0]))
                / (2 * h),
                (norm_value(spec, x + [0, h]) - norm_value(spec, x - [0, h]))
                / (2 * h)])
            assert np.max(np.abs(fd - ell)) <= 1e-6
    # gauge homogeneity
    X = rng.uniform(-1.0, 1.0, size=(500, 2))
    for t in (-2.0, 0.5, 3.0):
        assert np.max(np.abs(norm_value_batch(ROUNDED, t * X)
                             - abs(t) * norm_value_batch(ROUNDED, X))) <= 1e-12
    # sampled triangle inequality
    U = rng.uniform(-1.0, 1.0, size=(10_000, 2))
    V = rng.uniform(-1.0, 1.0, size=(10_000, 2))
    assert np.max(norm_value_batch(ROUNDED, U + V)
                  - norm_value_batch(ROUNDED, U)
                  - norm_value_batch(ROUNDED, V)) <= 1e-12
    # dominates the sup norm
    assert np.all(norm_value_batch(ROUNDED, U)
                  >= norm_value_batch(nfp.NormSpec.linf(), U) - 1e-12)
    # flat face of the rounded ball
    for y in np.linspace(-0.5, 0.5, 101):
        assert abs(norm_value(ROUNDED, [1.0, y]) - 1.0) <= 1e-14


@criterion("10 gap/height bijection: round trip and the rejected inverse")
def test_c10_gap_height_roundtrip():
    for alpha in (0.25, 0.5, 0.75):
        t = np.linspace(0.0, 1.0, 1000)
        back = nfp.gap_from_height(alpha, nfp.height_from_gap(alpha, t))
        assert np.max(np.abs(back - t)) <= 1e-10
    assert nfp.height_from_gap(0.5, 0.5) == pytest.approx(-1.0 / 6.0,
                                                          abs=1e-15)
    # the sign-flipped denominator variant fails the same round trip
    def flipped(alpha, mu):
        return (alpha - 1.0) * (1.0 + 2.0 * mu) / (alpha - 1.0 - 2.0 * alpha * mu)
    t = np.linspace(0.05, 0.95, 200)
    err = np.abs(flipped(0.5, nfp.height_from_gap(0.5, t)) - t)
    assert np.max(err) > 0.5
    # at alpha=1/2, height -1/6 must invert to gap 1/2; the variant gives 1
    assert flipped(0.5, -1.0 / 6.0) == pytest.approx(1.0)
