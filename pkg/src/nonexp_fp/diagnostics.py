"""Numerical verification of the fixed-point limit theory.

Checks shipped here, each returning a CheckReport:

* ``check_monotone``          Euclidean monotonicity of Id - f over random
                              pairs; holds whenever f is nonexpansive for the
                              Euclidean norm.
* ``check_duality_monotone``  the same bracket through the duality functional
                              of a smooth norm; holds whenever f is
                              nonexpansive for that norm.
* ``check_norm_monotone``     ||y_lam|| along a trajectory: constant at 0
                              when f(0) = 0, strictly growing otherwise.
                              Euclidean trajectories only.
* ``check_variational_limit`` l_{c-y}(c - anchor) <= 0 against a fixed-point
                              sample: the inequality that pins the path limit.
* ``uniqueness_probe``        at most one sampled fixed point can satisfy the
                              variational inequality against all others.
* ``convexity_probe``         midpoints of fixed-point pairs should stay
                              fixed when Fix(f) is convex; a violation is the
                              non-convexity witness.
* ``detect_divergence``       tail diameter of the scaled path x_lam; a
                              convergent path collapses, the oscillating
                              shear does not.
* ``check_duality_audit``     pairing identity and dual-norm bound of the
                              duality functional at seeded points.

Sampling uses numpy's seeded PCG64 generator, so every report is reproducible
from (seed, counts). All checks are pure; min/max aggregation is
order-independent.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .geometry import NormSpec, as_vector, duality_batch, norm_value_batch
from .maps import MapSpec
from .solver import Trajectory

DEDUP_FACTOR = 10.0  # dedup / exclusion radius, in units of fix_tol


@dataclasses.dataclass(frozen=True, eq=False)
class CheckReport:
    """Outcome of one sampled check; ``passed`` states whether
    ``worst_value`` stays on the right side of ``bound``."""

    name: str
    passed: bool
    worst_value: float
    bound: float
    samples: int
    seed: int | None = None
    worst_witness: tuple | None = None
    note: str | None = None

    def to_dict(self):
        wit = None
        if self.worst_witness is not None:
            wit = [np.asarray(w, dtype=float).tolist() for w in self.worst_witness]
        return {
            "name": self.name,
            "passed": self.passed,
            "worst_value": self.worst_value,
            "bound": self.bound,
            "samples": self.samples,
            "seed": self.seed,
            "worst_witness": wit,
            "note": self.note,
        }


@dataclasses.dataclass(frozen=True, eq=False)
class FixSample:
    """Sampled fixed points with residuals ||f(p) - p|| <= fix_tol."""

    points: np.ndarray
    residuals: np.ndarray
    method: str   # "analytic" or "averaged-iteration"
    fix_tol: float

    def __len__(self):
        return self.points.shape[0]


@dataclasses.dataclass(frozen=True, eq=False)
class DivergenceReport:
    tail_diameter: float
    cauchy_profile: np.ndarray   # successive Euclidean distances of x_lam
    tail_count: int

    def to_dict(self):
        return {
            "tail_diameter": self.tail_diameter,
            "tail_count": self.tail_count,
            "cauchy_profile": self.cauchy_profile.tolist(),
        }


# ---------------------------------------------------------------------------
# monotonicity brackets
# ---------------------------------------------------------------------------

def check_monotone(map_spec: MapSpec, n_pairs=10_000, seed=0,
                   tol=1e-9) -> CheckReport:
    """min over random pairs of <(x - f(x)) - (y - f(y)), x - y>.

    Nonnegative whenever f is nonexpansive w.r.t. the Euclidean norm; maps
    that are only l1-/sup-norm nonexpansive can and do violate it.
    """
    rng = np.random.default_rng(seed)
    X = map_spec.domain.sample(n_pairs, rng)
    Y = map_spec.domain.sample(n_pairs, rng)
    G = (X - map_spec.eval_batch(X)) - (Y - map_spec.eval_batch(Y))
    vals = np.sum(G * (X - Y), axis=1)
    i = int(np.argmin(vals))
    return CheckReport(name="monotone_euclidean", passed=bool(vals[i] >= -tol),
                       worst_value=float(vals[i]), bound=-tol,
                       samples=n_pairs, seed=seed,
                       worst_witness=(X[i], Y[i]))


def check_duality_monotone(map_spec: MapSpec, norm: NormSpec, n_pairs=10_000,
                           seed=0, tol=1e-9) -> CheckReport:
    """min over random pairs of l_{x-y}((x - f(x)) - (y - f(y))).

    Requires a smooth norm; nonnegative whenever f is nonexpansive for it.
    """
    if not norm.smooth:
        raise ValueError(f"duality bracket needs a smooth norm, got {norm.label()}")
    rng = np.random.default_rng(seed)
    X = map_spec.domain.sample(n_pairs, rng)
    Y = map_spec.domain.sample(n_pairs, rng)
    W = X - Y
    keep = norm_value_batch(norm, W) > 0.0
    X, Y, W = X[keep], Y[keep], W[keep]
    L = duality_batch(norm, W)
    G = (X - map_spec.eval_batch(X)) - (Y - map_spec.eval_batch(Y))
    vals = np.sum(L * G, axis=1)
    i = int(np.argmin(vals))
    return CheckReport(name=f"monotone_duality[{norm.label()}]",
                       passed=bool(vals[i] >= -tol),
                       worst_value=float(vals[i]), bound=-tol,
                       samples=int(keep.sum()), seed=seed,
                       worst_witness=(X[i], Y[i]))


def check_duality_audit(norm: NormSpec, dim, n_points=8, n_dirs=1000, seed=0,
                        tol=1e-9) -> CheckReport:
    """Defining properties of the duality functional at seeded points.

    For each sampled nonzero x: |l_x(x) - ||x||| must vanish and
    l_x(u) - ||u|| must stay <= 0 over seeded unit-ball directions u (dual
    norm at most 1). Works for subgradient selections too.
    """
    from .geometry import duality_check
    rng = np.random.default_rng(seed)
    worst = -math.inf
    witness = None
    for k in range(n_points):
        x = rng.uniform(-1.0, 1.0, dim)
        if norm_value_batch(norm, x[None, :])[0] <= 1e-6:
            continue
        rep = duality_check(norm, x, n_dirs=n_dirs, seed=seed + 1 + k)
        value = max(rep.pairing_err, rep.dual_norm_excess)
        if value > worst:
            worst, witness = value, x
    return CheckReport(name=f"duality_audit[{norm.label()}]",
                       passed=bool(worst <= tol), worst_value=float(worst),
                       bound=tol, samples=n_points * n_dirs, seed=seed,
                       worst_witness=(witness,) if witness is not None else None)


def check_norm_monotone(traj: Trajectory, fix_tol=1e-9) -> CheckReport:
    """Growth of ||y_lam - anchor|| along a Euclidean-norm trajectory.

    Constant 0 when the anchor is a fixed point, otherwise nondecreasing
    (slack 4*tol) with a strict net increase over the schedule. Anchored
    families reduce to the plain one for the translated map
    z -> f(z + anchor) - anchor, so measuring from the anchor is the
    conjugation-invariant statement. Proved only for scalar-product norms,
    so other experiment norms are refused.
    """
    if traj.norm.kind != "euclidean":
        raise ValueError("norm growth is asserted only for the Euclidean "
                         f"experiment norm, not {traj.norm.label()}")
    ys = traj.ys() - traj.anchor
    norms = np.sqrt(np.sum(ys * ys, axis=1))
    slack = 4.0 * traj.tol
    fa = traj.map.eval(traj.anchor)
    anchor_fixed = float(np.linalg.norm(fa - traj.anchor)) <= fix_tol
    if anchor_fixed:
        worst = float(np.max(norms))
        return CheckReport(name="norm_growth", passed=bool(worst <= slack),
                           worst_value=worst, bound=slack,
                           samples=len(norms),
                           note="anchor is fixed: path pinned at the anchor")
    diffs = np.diff(norms)
    worst = float(np.min(diffs)) if len(diffs) else 0.0
    net = float(norms[-1] - norms[0]) if len(norms) > 1 else 0.0
    passed = worst >= -slack and (net > 0.0 or len(norms) < 2)
    return CheckReport(name="norm_growth", passed=bool(passed),
                       worst_value=worst, bound=-slack, samples=len(norms),
                       note=f"net growth {net:.3e}")


# ---------------------------------------------------------------------------
# fixed-point sampling
# ---------------------------------------------------------------------------

def sample_fixed_points(map_spec: MapSpec, n_starts=1000, seed=0,
                        fix_tol=1e-9, max_iter=200_000,
                        method="auto") -> FixSample:
    """Fixed points of f with residuals, deduplicated within 10*fix_tol.

    ``auto`` prefers the map's closed-form sampler; otherwise runs the
    averaged iteration x <- (x + f(x))/2 from seeded domain starts, which
    converges for nonexpansive self-maps of compact convex sets.
    """
    if n_starts < 1:
        raise ValueError("need at least one start")
    if method not in ("auto", "analytic", "averaged"):
        raise ValueError("method must be 'auto', 'analytic', or 'averaged'")
    rng = np.random.default_rng(seed)
    pts = None
    used = "analytic"
    if method in ("auto", "analytic"):
        pts = map_spec.analytic_fixed_points(n_starts, rng)
        if pts is None and method == "analytic":
            raise ValueError(f"{map_spec.label()} has no analytic fixed-point sampler")
    if pts is None:
        used = "averaged-iteration"
        pts = _averaged_iteration(map_spec, map_spec.domain.sample(n_starts, rng),
                                  fix_tol, max_iter)
    res = np.linalg.norm(map_spec.eval_batch(pts) - pts, axis=1)
    keep = res <= fix_tol
    pts, res = pts[keep], res[keep]
    if pts.shape[0] == 0:
        raise RuntimeError("no fixed points found within fix_tol")
    pts, res = _dedup(pts, res, DEDUP_FACTOR * fix_tol)
    return FixSample(points=pts, residuals=res, method=used, fix_tol=fix_tol)


def _averaged_iteration(map_spec, X, fix_tol, max_iter):
    X = np.array(X, dtype=float)
    for _ in range(max_iter):
        F = map_spec.eval_batch(X)
        if float(np.max(np.linalg.norm(F - X, axis=1))) <= fix_tol:
            return X
        X = 0.5 * (X + F)
    res = np.linalg.norm(map_spec.eval_batch(X) - X, axis=1)
    if not np.any(res <= fix_tol):
        raise RuntimeError("averaged iteration produced no fixed points "
                           f"within {max_iter} iterations")
    return X


def _dedup(pts, res, radius):
    keep = []
    for i in range(pts.shape[0]):
        if all(np.linalg.norm(pts[i] - pts[j]) > radius for j in keep):
            keep.append(i)
    return pts[keep], res[keep]


def refine_fixed_point(map_spec: MapSpec, x0, fix_tol=1e-9,
                       max_iter=200_000) -> np.ndarray:
    """Averaged iteration from a single start until the residual is tiny;
    used to push a path terminal onto Fix(f)."""
    x = as_vector(x0, map_spec.dim).copy()
    for _ in range(max_iter):
        fx = map_spec.eval_batch(x[None, :])[0]
        if float(np.linalg.norm(fx - x)) <= fix_tol:
            return x
        x = 0.5 * (x + fx)
    raise RuntimeError("averaged iteration did not reach fix_tol")


def extend_sample(fix: FixSample, point, map_spec: MapSpec) -> FixSample:
    """Sample with one more fixed point appended (deduplicated)."""
    p = as_vector(point, fix.points.shape[1])
    r = float(np.linalg.norm(map_spec.eval_batch(p[None, :])[0] - p))
    if r > fix.fix_tol:
        raise ValueError("appended point is not a fixed point within fix_tol")
    pts = np.vstack([fix.points, p[None, :]])
    res = np.concatenate([fix.residuals, [r]])
    pts, res = _dedup(pts, res, DEDUP_FACTOR * fix.fix_tol)
    return FixSample(points=pts, residuals=res, method=fix.method,
                     fix_tol=fix.fix_tol)


# ---------------------------------------------------------------------------
# variational inequality at the limit
# ---------------------------------------------------------------------------

def _vi_values(candidate, pts, norm, anchor, exclusion):
    """l_{candidate - y}(candidate - anchor) for sample points y beyond the
    exclusion radius (the functional needs a nonzero argument)."""
    W = candidate - pts
    keep = np.linalg.norm(W, axis=1) > exclusion
    if not np.any(keep):
        return np.empty(0), keep
    L = duality_batch(norm, W[keep])
    return L @ (candidate - anchor), keep


def check_variational_limit(candidate, fix: FixSample, norm: NormSpec,
                            anchor=None, tol=1e-8) -> CheckReport:
    """max over sampled fixed points y of l_{c-y}(c - anchor); the limit of
    the anchored path is the unique fixed point keeping this <= 0."""
    if not norm.smooth:
        raise ValueError(f"variational inequality needs a smooth norm, "
                         f"got {norm.label()}")
    if len(fix) == 0:
        raise ValueError("empty fixed-point sample")
    candidate = as_vector(candidate, fix.points.shape[1])
    anchor = (np.zeros_like(candidate) if anchor is None
              else as_vector(anchor, candidate.shape[0]))
    vals, kept = _vi_values(candidate, fix.points, norm, anchor,
                            DEDUP_FACTOR * fix.fix_tol)
    if vals.size == 0:
        return CheckReport(name=f"variational_limit[{norm.label()}]",
                           passed=True, worst_value=-math.inf, bound=tol,
                           samples=0, note="all sample points within the "
                                           "exclusion radius")
    i = int(np.argmax(vals))
    witness = fix.points[np.flatnonzero(kept)[i]]
    return CheckReport(name=f"variational_limit[{norm.label()}]",
                       passed=bool(vals[i] <= tol),
                       worst_value=float(vals[i]), bound=tol,
                       samples=int(vals.size),
                       worst_witness=(candidate, witness))


def uniqueness_probe(fix: FixSample, norm: NormSpec, anchor=None,
                     tol=1e-8) -> CheckReport:
    """Count of sampled fixed points satisfying the variational inequality
    against all others; two qualifiers would contradict each other, so the
    count must be at most 1."""
    if not norm.smooth:
        raise ValueError(f"variational inequality needs a smooth norm, "
                         f"got {norm.label()}")
    pts = fix.points
    anchor = (np.zeros(pts.shape[1]) if anchor is None
              else as_vector(anchor, pts.shape[1]))
    qualifiers = []
    for i in range(pts.shape[0]):
        others = np.delete(pts, i, axis=0)
        vals, _ = _vi_values(pts[i], others, norm, anchor,
                             DEDUP_FACTOR * fix.fix_tol)
        if vals.size == 0 or float(np.max(vals)) <= tol:
            qualifiers.append(i)
    witness = tuple(pts[i] for i in qualifiers[:2]) or None
    return CheckReport(name=f"uniqueness[{norm.label()}]",
                       passed=bool(len(qualifiers) <= 1),
                       worst_value=float(len(qualifiers)), bound=1.0,
                       samples=pts.shape[0], worst_witness=witness,
                       note=f"{len(qualifiers)} qualifying sample(s)")


# ---------------------------------------------------------------------------
# path behavior
# ---------------------------------------------------------------------------

def detect_divergence(traj: Trajectory, tail_fraction=0.6) -> DivergenceReport:
    """Tail diameter of the scaled path x_lam = y_lam/lam.

    A convergent family collapses the tail; the oscillating shear keeps it
    above 1.5*eps0 even though every per-lam solve meets its residual bound.
    """
    if not (0.0 < tail_fraction <= 1.0):
        raise ValueError("tail_fraction must lie in (0, 1]")
    if not traj.reports:
        raise ValueError("empty trajectory")
    xs = traj.xs()
    m = int(math.ceil(tail_fraction * xs.shape[0]))
    tail = xs[-m:]
    diffs = tail[:, None, :] - tail[None, :, :]
    diam = float(np.max(np.sqrt(np.sum(diffs * diffs, axis=2)))) if m > 1 else 0.0
    prof = np.linalg.norm(np.diff(xs, axis=0), axis=1) if xs.shape[0] > 1 \
        else np.empty(0)
    return DivergenceReport(tail_diameter=diam, cauchy_profile=prof,
                            tail_count=m)


def convexity_probe(fix: FixSample, map_spec: MapSpec, n_midpoints=1000,
                    seed=0, fix_tol=1e-9) -> CheckReport:
    """||f(m) - m|| at midpoints of sampled fixed-point pairs.

    Pairs are seeded draws plus, always, the two farthest-apart samples:
    the diameter pair is the natural first witness when Fix(f) fails to be
    convex. Any midpoint residual above fix_tol disproves convexity.
    """
    pts = fix.points
    n = pts.shape[0]
    if n < 2:
        return CheckReport(name="fix_convexity", passed=True, worst_value=0.0,
                           bound=fix_tol, samples=0,
                           note="fewer than two fixed points: vacuous")
    rng = np.random.default_rng(seed)
    I = rng.integers(0, n, size=n_midpoints)
    J = rng.integers(0, n, size=n_midpoints)
    keep = I != J
    I, J = I[keep], J[keep]
    # diameter pair, appended deterministically
    diffs = pts[:, None, :] - pts[None, :, :]
    dmat = np.sum(diffs * diffs, axis=2)
    imax, jmax = np.unravel_index(int(np.argmax(dmat)), dmat.shape)
    I = np.append(I, imax)
    J = np.append(J, jmax)
    M = 0.5 * (pts[I] + pts[J])
    viol = np.linalg.norm(map_spec.eval_batch(M) - M, axis=1)
    k = int(np.argmax(viol))
    return CheckReport(name="fix_convexity", passed=bool(viol[k] <= fix_tol),
                       worst_value=float(viol[k]), bound=fix_tol,
                       samples=int(I.shape[0]), seed=seed,
                       worst_witness=(pts[I[k]], pts[J[k]], M[k]))


def residual_bounds(traj: Trajectory) -> CheckReport:
    """Every record must satisfy residual <= tol*(1-lam)."""
    lams = traj.lambdas()
    res = np.array([r.residual for r in traj.reports])
    ratios = res / (traj.tol * (1.0 - lams))
    worst = float(np.max(ratios))
    return CheckReport(name="residual_bounds", passed=bool(worst <= 1.0),
                       worst_value=worst, bound=1.0, samples=len(traj.reports))
