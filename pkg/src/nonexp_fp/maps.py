"""1-Lipschitz self-maps of convex compact domains.

The catalog covers coordinate clamps, Euclidean projections, norm-bounded
affine maps, compositions and convex combinations, plus the two purpose-built
counterexample constructions:

* ``OscillatingShearMap``: on the triangle {-1/2 <= y <= 1/2 - |x|}, the map
  f(x, y) = (x + eps(y), alpha*(y + 1/2) - 1/2). The bottom edge is fixed
  pointwise. The shear amplitude eps is built from the log-oscillation
  t -> t*sin(ln t) composed with the inverse of the gap-to-height map, so the
  first coordinate of the scaled-fixed-point family equals
  eps0*sin(ln(1 - lam)) and keeps oscillating as lam -> 1. Nonexpansive for
  the l1 norm when eps is (1-alpha)-Lipschitz.

* ``GraphProjectionMap``: on a box, the vertical projection
  (x, y) -> (x, g(x)) onto the graph of a (1/2)-Lipschitz profile g.
  Nonexpansive for the sup norm and for corner-rounded gauges whose flat face
  spans |y| <= 1/2; its fixed set is the graph, in general not convex.

Maps are immutable after construction and all evaluation is pure.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from ._kernel.ops import (MAX_DEPTH, MAX_DIM, OP_AFFINE, OP_CLAMP, OP_COMPOSE,
                          OP_CONVEX, OP_GRAPH, OP_PROJ_BALL, OP_PROJ_TRIANGLE,
                          OP_SHEAR)
from .domains import Ball, Box, ConvexDomain, TriangleT
from .geometry import NormSpec, as_vector, norm_value_batch

_AUDIT_SEED = 71923
_AUDIT_SAMPLES = 256


# ---------------------------------------------------------------------------
# scalar machinery of the oscillating shear
# ---------------------------------------------------------------------------

def height_from_gap(alpha, gap):
    """Invariant height of the shear map at contraction gap t = 1 - lam.

    height = (1-t)*(alpha-1) / (2*(1 - alpha*(1-t))), an increasing
    bi-Lipschitz bijection [0, 1] -> [-1/2, 0].
    """
    _check_alpha(alpha)
    t = np.asarray(gap, dtype=float)
    if np.any(t < -1e-12) or np.any(t > 1.0 + 1e-12):
        raise ValueError("gap must lie in [0, 1]")
    out = (1.0 - t) * (alpha - 1.0) / (2.0 * (1.0 - alpha * (1.0 - t)))
    return float(out) if np.isscalar(gap) else out


def gap_from_height(alpha, height):
    """Exact inverse of ``height_from_gap``: solving mu = height_from_gap(t)
    for t gives t = (alpha-1)*(1+2*mu) / (alpha-1+2*alpha*mu).

    (The variant with denominator alpha-1-2*alpha*mu does not invert the
    forward map; see the round-trip tests.)
    """
    _check_alpha(alpha)
    mu = np.asarray(height, dtype=float)
    if np.any(mu < -0.5 - 1e-12) or np.any(mu > 1e-12):
        raise ValueError("height must lie in [-1/2, 0]")
    out = (alpha - 1.0) * (1.0 + 2.0 * mu) / (alpha - 1.0 + 2.0 * alpha * mu)
    return float(out) if np.isscalar(height) else out


def log_oscillation(t):
    """t*sin(ln t) for t > 0, extended by 0 at t = 0; Lipschitz on [0, 1]."""
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0.0, t, 1.0)
    out = np.where(t > 0.0, safe * np.sin(np.log(safe)), 0.0)
    return float(out) if out.ndim == 0 else out


def calibrate_amplitude(alpha, safety=0.9, grid_n=100_000):
    """Largest certified shear amplitude eps0.

    Estimates the Lipschitz constant L of log_oscillation(gap_from_height(.))
    on [-1/2, 0] by grid difference quotients and returns
    safety*(1-alpha)/L, so the resulting shear amplitude stays strictly
    inside the (1-alpha)-Lipschitz budget.
    """
    _check_alpha(alpha)
    if not (0.0 < safety < 1.0):
        raise ValueError("safety factor must lie in (0, 1)")
    if grid_n < 1000:
        raise ValueError("grid too coarse to certify the Lipschitz constant")
    mu = np.linspace(-0.5, 0.0, grid_n)
    vals = log_oscillation(gap_from_height(alpha, mu))
    lip = float(np.max(np.abs(np.diff(vals) / np.diff(mu))))
    return safety * (1.0 - alpha) / lip


def _check_alpha(alpha):
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must lie in (0, 1)")


@dataclasses.dataclass(frozen=True)
class ShearProfile:
    """Shear amplitude profile eps(y) = eps0 * log_oscillation(gap(y)).

    eps(-1/2) = 0, eps(y) = eps(0) = 0 for y >= 0, and a grid audit checks
    both the (1-alpha)-Lipschitz bound and the containment envelope
    |eps(y)| <= (1-alpha)*(y + 1/2).
    """

    alpha: float
    eps0: float

    def __post_init__(self):
        _check_alpha(self.alpha)
        if not (self.eps0 > 0.0):
            raise ValueError("eps0 must be positive")
        ys = np.linspace(-0.5, 0.5, 4001)
        vals = self.epsilon(ys)
        quot = np.max(np.abs(np.diff(vals) / np.diff(ys)))
        budget = 1.0 - self.alpha
        if quot > budget * (1.0 + 1e-9):
            raise ValueError(f"shear amplitude eps0={self.eps0:g} breaks the "
                             f"({budget:g})-Lipschitz budget (grid slope {quot:g})")
        envelope = budget * (ys + 0.5) + 1e-12
        if np.any(np.abs(vals) > envelope):
            raise ValueError("shear amplitude escapes the containment envelope")

    def epsilon(self, y):
        """Amplitude at height y in [-1/2, 1/2]; vectorized."""
        arr = np.asarray(y, dtype=float)
        if np.any(arr < -0.5 - 1e-12) or np.any(arr > 0.5 + 1e-12):
            raise ValueError("height outside [-1/2, 1/2]")
        clipped = np.clip(arr, -0.5, 0.0)
        e = self.eps0 * log_oscillation(gap_from_height(self.alpha, clipped))
        out = np.where(arr >= 0.0, 0.0, e)
        return float(out) if np.isscalar(y) else out


# ---------------------------------------------------------------------------
# map specs
# ---------------------------------------------------------------------------

class MapSpec:
    """A 1-Lipschitz self-map of a convex compact domain containing 0.

    Construction runs a seeded self-map audit (images of 256 domain samples
    must stay in the domain). ``eval`` checks membership of its argument;
    ``eval_batch`` is the raw vectorized evaluation used by diagnostics.
    """

    domain: ConvexDomain

    @property
    def dim(self) -> int:
        return self.domain.dim

    def eval(self, x) -> np.ndarray:
        x = as_vector(x, self.dim)
        if not self.domain.contains(x):
            raise ValueError(f"point {x.tolist()} outside the map's domain")
        return self._apply_batch(x[None, :])[0]

    def eval_batch(self, X) -> np.ndarray:
        return self._apply_batch(np.asarray(X, dtype=float))

    def _apply_batch(self, X) -> np.ndarray:
        raise NotImplementedError

    def analytic_fixed_points(self, n, rng):
        """Closed-form sample of Fix(f) when available, else None."""
        return None

    def label(self) -> str:
        raise NotImplementedError

    def _audit(self):
        rng = np.random.default_rng(_AUDIT_SEED)
        if not self.domain.contains(np.zeros(self.dim)):
            raise ValueError("map domain must contain the origin")
        X = self.domain.sample(_AUDIT_SAMPLES, rng)
        inside = self.domain.contains_batch(self._apply_batch(X))
        if not np.all(inside):
            raise ValueError(f"{self.label()} maps sampled points outside its domain")


def map_eval(map_spec: MapSpec, x) -> np.ndarray:
    """Evaluate a map at a point of its domain."""
    return map_spec.eval(x)


@dataclasses.dataclass(frozen=True, eq=False)
class OscillatingShearMap(MapSpec):
    profile: ShearProfile
    domain: ConvexDomain = dataclasses.field(default_factory=TriangleT)

    def __post_init__(self):
        if not isinstance(self.domain, TriangleT):
            raise ValueError("the oscillating shear lives on the triangle domain")
        self._audit()

    def _apply_batch(self, X):
        out = np.empty_like(X)
        out[:, 0] = X[:, 0] + self.profile.epsilon(X[:, 1])
        out[:, 1] = self.profile.alpha * (X[:, 1] + 0.5) - 0.5
        return out

    def analytic_fixed_points(self, n, rng):
        # fixed set = the bottom edge [-1, 1] x {-1/2}
        xs = np.linspace(-1.0, 1.0, n)
        return np.column_stack([xs, np.full(n, -0.5)])

    def label(self):
        return (f"oscillating_shear(alpha={self.profile.alpha:g}, "
                f"eps0={self.profile.eps0:.6g})")


@dataclasses.dataclass(frozen=True)
class AbsAffineProfile:
    """Profile g(u) = offset + slope*|u|; (1/2)-Lipschitz when |slope| <= 1/2."""

    offset: float
    slope: float

    def __post_init__(self):
        if abs(self.slope) > 0.5:
            raise ValueError("profile slope must satisfy |slope| <= 1/2")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = self.offset + self.slope * np.abs(u)
        return float(out) if out.ndim == 0 else out

    def bound(self):
        return max(abs(self.offset), abs(self.offset + self.slope))

    def label(self):
        return f"{self.offset:g}{self.slope:+g}|x|"


@dataclasses.dataclass(frozen=True, eq=False)
class GraphProjectionMap(MapSpec):
    """Vertical projection (x, y) -> (x, g(x)) onto the graph of g.

    Domain is [-1, 1] x [-M, M] with M = max |g| on [-1, 1]. A grid audit
    certifies the (1/2)-Lipschitz requirement for generic callables;
    AbsAffineProfile is validated exactly.
    """

    profile: object
    domain: ConvexDomain = dataclasses.field(init=False)

    def __post_init__(self):
        if isinstance(self.profile, AbsAffineProfile):
            bound = self.profile.bound()
        else:
            xs = np.linspace(-1.0, 1.0, 4097)
            vals = np.asarray([float(self.profile(x)) for x in xs])
            quot = np.max(np.abs(np.diff(vals) / np.diff(xs)))
            if quot > 0.5 + 1e-9:
                raise ValueError("profile must be (1/2)-Lipschitz on [-1, 1]")
            bound = float(np.max(np.abs(vals)))
        object.__setattr__(self, "domain",
                           Box(np.array([-1.0, -bound]), np.array([1.0, bound])))
        self._audit()

    def _g(self, u):
        if isinstance(self.profile, AbsAffineProfile):
            return self.profile(u)
        return np.asarray([float(self.profile(x)) for x in np.atleast_1d(u)])

    def _apply_batch(self, X):
        out = np.empty_like(X)
        out[:, 0] = X[:, 0]
        out[:, 1] = self._g(X[:, 0])
        return out

    def analytic_fixed_points(self, n, rng):
        # fixed set = the graph of g over [-1, 1], endpoints included
        xs = np.linspace(-1.0, 1.0, n)
        return np.column_stack([xs, self._g(xs)])

    def label(self):
        if isinstance(self.profile, AbsAffineProfile):
            return f"graph_projection({self.profile.label()})"
        return "graph_projection(<callable>)"


@dataclasses.dataclass(frozen=True, eq=False)
class EuclideanProjectionMap(MapSpec):
    """Euclidean nearest-point projection onto a convex target set."""

    target: ConvexDomain
    domain: ConvexDomain

    def __post_init__(self):
        if self.target.dim != self.domain.dim:
            raise ValueError("target and domain dimensions differ")
        self._audit()

    def _apply_batch(self, X):
        return self.target.project_batch(X)

    def analytic_fixed_points(self, n, rng):
        # Fix of a projection is exactly its target set
        return self.target.sample(n, rng)

    def label(self):
        return f"euclidean_projection({self.target.label()})"


@dataclasses.dataclass(frozen=True, eq=False)
class CoordClampMap(MapSpec):
    """Coordinatewise clamp onto [lo, hi]; nonexpansive in every p-norm."""

    lo: np.ndarray
    hi: np.ndarray
    domain: ConvexDomain

    def __post_init__(self):
        object.__setattr__(self, "lo", as_vector(self.lo, self.domain.dim))
        object.__setattr__(self, "hi", as_vector(self.hi, self.domain.dim))
        if np.any(self.hi < self.lo):
            raise ValueError("clamp box needs lo <= hi componentwise")
        self._audit()

    def _apply_batch(self, X):
        return np.clip(X, self.lo, self.hi)

    def analytic_fixed_points(self, n, rng):
        return Box(self.lo, self.hi).sample(n, rng)

    def label(self):
        return f"coord_clamp({self.lo.tolist()}, {self.hi.tolist()})"


@dataclasses.dataclass(frozen=True, eq=False)
class AffineMap(MapSpec):
    """x -> matrix @ x + offset with operator norm <= 1 under ``norm``."""

    matrix: np.ndarray
    offset: np.ndarray
    domain: ConvexDomain
    norm: NormSpec = dataclasses.field(default_factory=NormSpec.euclidean)

    def __post_init__(self):
        d = self.domain.dim
        A = np.asarray(self.matrix, dtype=float)
        if A.shape != (d, d):
            raise ValueError(f"matrix must be {d}x{d}")
        object.__setattr__(self, "matrix", A)
        object.__setattr__(self, "offset", as_vector(self.offset, d))
        op = _operator_norm(A, self.norm)
        if op > 1.0 + 1e-9:
            raise ValueError(f"matrix operator norm {op:g} exceeds 1 under "
                             f"{self.norm.label()}")
        self._audit()

    def _apply_batch(self, X):
        return X @ self.matrix.T + self.offset

    def analytic_fixed_points(self, n, rng):
        # unique fixed point when I - A is invertible
        d = self.domain.dim
        try:
            z = np.linalg.solve(np.eye(d) - self.matrix, self.offset)
        except np.linalg.LinAlgError:
            return None
        if not self.domain.contains(z, tol=1e-9):
            return None
        return z[None, :]

    def label(self):
        return f"affine(dim={self.domain.dim}, norm={self.norm.label()})"


def _operator_norm(A, norm: NormSpec):
    if norm.kind == "euclidean":
        return float(np.linalg.norm(A, 2))
    if norm.kind == "l1":
        return float(np.max(np.sum(np.abs(A), axis=0)))
    if norm.kind == "linf":
        return float(np.max(np.sum(np.abs(A), axis=1)))
    # no closed form: certify on sampled directions
    rng = np.random.default_rng(_AUDIT_SEED)
    U = rng.standard_normal((4096, A.shape[0]))
    U = np.vstack([U, np.eye(A.shape[0])])
    num = norm_value_batch(norm, U @ A.T)
    den = norm_value_batch(norm, U)
    return float(np.max(num / den))


@dataclasses.dataclass(frozen=True, eq=False)
class CompositionMap(MapSpec):
    """Left-to-right composition of self-maps of a common domain."""

    parts: tuple
    domain: ConvexDomain = None

    def __post_init__(self):
        if not self.parts:
            raise ValueError("composition needs at least one map")
        if self.domain is None:
            object.__setattr__(self, "domain", self.parts[0].domain)
        object.__setattr__(self, "parts", tuple(self.parts))
        self._audit()

    def _apply_batch(self, X):
        for part in self.parts:
            X = part._apply_batch(X)
        return X

    def label(self):
        return "compose[" + ", ".join(p.label() for p in self.parts) + "]"


@dataclasses.dataclass(frozen=True, eq=False)
class ConvexCombinationMap(MapSpec):
    """Pointwise convex combination sum_i w_i f_i(x); nonexpansive when each
    f_i is."""

    weights: np.ndarray
    parts: tuple
    domain: ConvexDomain = None

    def __post_init__(self):
        w = as_vector(self.weights)
        if not self.parts or len(self.parts) != w.shape[0]:
            raise ValueError("need one weight per map")
        if np.any(w < 0.0) or abs(float(np.sum(w)) - 1.0) > 1e-12:
            raise ValueError("weights must be nonnegative and sum to 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "parts", tuple(self.parts))
        if self.domain is None:
            object.__setattr__(self, "domain", self.parts[0].domain)
        self._audit()

    def _apply_batch(self, X):
        acc = np.zeros_like(np.asarray(X, dtype=float))
        for w, part in zip(self.weights, self.parts):
            acc += w * part._apply_batch(X)
        return acc

    def label(self):
        return "convex[" + ", ".join(p.label() for p in self.parts) + "]"


# ---------------------------------------------------------------------------
# empirical Lipschitz certificate
# ---------------------------------------------------------------------------

def lipschitz_estimate(map_spec: MapSpec, norm: NormSpec, n_pairs=10_000,
                       seed=0) -> float:
    """Max of ||f(x)-f(x')|| / ||x-x'|| over seeded random domain pairs.

    Returns 0.0 for degenerate (zero-diameter) domains.
    """
    if n_pairs < 1:
        raise ValueError("need at least one pair")
    rng = np.random.default_rng(seed)
    X = map_spec.domain.sample(n_pairs, rng)
    Y = map_spec.domain.sample(n_pairs, rng)
    den = norm_value_batch(norm, X - Y)
    keep = den > 0.0
    if not np.any(keep):
        return 0.0
    num = norm_value_batch(norm,
                           map_spec.eval_batch(X[keep]) - map_spec.eval_batch(Y[keep]))
    return float(np.max(num / den[keep]))


# ---------------------------------------------------------------------------
# lowering to the kernel program encoding
# ---------------------------------------------------------------------------

class _NotLowerable(Exception):
    pass


def lower(map_spec: MapSpec):
    """Flat kernel program for a map, or None when it has no encoding
    (halfspace projections, generic callables, dim > 16, deep nesting)."""
    if map_spec.dim > MAX_DIM:
        return None
    try:
        prog = _lower_node(map_spec, 0)
    except _NotLowerable:
        return None
    return np.asarray(prog, dtype=float)


def _lower_node(m: MapSpec, depth):
    if depth > MAX_DEPTH:
        raise _NotLowerable
    d = m.dim
    if isinstance(m, OscillatingShearMap):
        return [OP_SHEAR, m.profile.alpha, m.profile.eps0]
    if isinstance(m, GraphProjectionMap):
        if isinstance(m.profile, AbsAffineProfile):
            return [OP_GRAPH, m.profile.offset, m.profile.slope]
        raise _NotLowerable
    if isinstance(m, CoordClampMap):
        return [OP_CLAMP, d, *m.lo.tolist(), *m.hi.tolist()]
    if isinstance(m, EuclideanProjectionMap):
        t = m.target
        if isinstance(t, Box):
            return [OP_CLAMP, d, *t.lo.tolist(), *t.hi.tolist()]
        if isinstance(t, Ball):
            return [OP_PROJ_BALL, d, *t.center.tolist(), t.radius]
        if isinstance(t, TriangleT):
            return [OP_PROJ_TRIANGLE]
        raise _NotLowerable
    if isinstance(m, AffineMap):
        return [OP_AFFINE, d, *m.matrix.ravel().tolist(), *m.offset.tolist()]
    if isinstance(m, CompositionMap):
        prog = [OP_COMPOSE, len(m.parts)]
        for part in m.parts:
            prog.extend(_lower_node(part, depth + 1))
        return prog
    if isinstance(m, ConvexCombinationMap):
        prog = [OP_CONVEX, len(m.parts), *m.weights.tolist()]
        for part in m.parts:
            prog.extend(_lower_node(part, depth + 1))
        return prog
    raise _NotLowerable
