"""Convex compact domains: membership, sampling, and exact Euclidean projection.

Variants: axis-aligned boxes, Euclidean balls, a fixed 2-D triangle
{(x, y): -1/2 <= y <= 1/2 - |x|}, and bounded intersections of halfspaces.
Membership uses a 1e-12 slack so iterates that graze a boundary through
rounding still count as inside.
"""

from __future__ import annotations

import dataclasses
import itertools

import numpy as np

from .geometry import as_vector

CONTAINS_TOL = 1e-12


class ConvexDomain:
    """Base class; concrete domains implement the full surface below."""

    @property
    def dim(self) -> int:
        raise NotImplementedError

    def contains(self, x, tol=CONTAINS_TOL) -> bool:
        x = as_vector(x, self.dim)
        return bool(self.contains_batch(x[None, :], tol)[0])

    def contains_batch(self, X, tol=CONTAINS_TOL) -> np.ndarray:
        raise NotImplementedError

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def project(self, x) -> np.ndarray:
        x = as_vector(x, self.dim)
        return self.project_batch(x[None, :])[0]

    def project_batch(self, X) -> np.ndarray:
        raise NotImplementedError

    def sample(self, n, rng) -> np.ndarray:
        """n points, uniform on the domain, by rejection from the bounding box."""
        lo, hi = self.bounding_box()
        out = np.empty((n, self.dim))
        have = 0
        for _ in range(100_000):
            if have >= n:
                break
            cand = rng.uniform(lo, hi, size=(max(2 * (n - have), 16), self.dim))
            keep = cand[self.contains_batch(cand, tol=0.0)]
            take = min(n - have, keep.shape[0])
            out[have:have + take] = keep[:take]
            have += take
        if have < n:
            raise RuntimeError("rejection sampling starved; domain too thin")
        return out

    def label(self) -> str:
        raise NotImplementedError


@dataclasses.dataclass(frozen=True, eq=False)
class Box(ConvexDomain):
    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", as_vector(self.lo))
        object.__setattr__(self, "hi", as_vector(self.hi, self.lo.shape[0]))
        if np.any(self.hi < self.lo):
            raise ValueError("box needs lo <= hi componentwise")

    @property
    def dim(self):
        return self.lo.shape[0]

    def contains_batch(self, X, tol=CONTAINS_TOL):
        X = np.asarray(X, dtype=float)
        return np.all((X >= self.lo - tol) & (X <= self.hi + tol), axis=1)

    def bounding_box(self):
        return self.lo.copy(), self.hi.copy()

    def project_batch(self, X):
        return np.clip(np.asarray(X, dtype=float), self.lo, self.hi)

    def label(self):
        return f"box({self.lo.tolist()}, {self.hi.tolist()})"


@dataclasses.dataclass(frozen=True, eq=False)
class Ball(ConvexDomain):
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", as_vector(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if not self.radius > 0.0:
            raise ValueError("ball radius must be positive")

    @property
    def dim(self):
        return self.center.shape[0]

    def contains_batch(self, X, tol=CONTAINS_TOL):
        D = np.asarray(X, dtype=float) - self.center
        return np.sqrt(np.sum(D * D, axis=1)) <= self.radius + tol

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def project_batch(self, X):
        X = np.asarray(X, dtype=float)
        D = X - self.center
        dist = np.sqrt(np.sum(D * D, axis=1))
        scale = np.where(dist > self.radius,
                         self.radius / np.where(dist > 0.0, dist, 1.0), 1.0)
        return self.center + D * scale[:, None]

    def sample(self, n, rng):
        """Uniform in the ball: normalized Gaussian directions, radii
        scaled by U^(1/d)."""
        d = self.dim
        dirs = rng.standard_normal((n, d))
        dirs /= np.sqrt(np.sum(dirs * dirs, axis=1))[:, None]
        radii = self.radius * rng.uniform(0.0, 1.0, n) ** (1.0 / d)
        return self.center + dirs * radii[:, None]

    def label(self):
        return f"ball({self.center.tolist()}, {self.radius:g})"


_TRI_VERTS = np.array([[-1.0, -0.5], [1.0, -0.5], [0.0, 0.5]])
_TRI_EDGES = ((0, 1), (0, 2), (1, 2))


@dataclasses.dataclass(frozen=True, eq=False)
class TriangleT(ConvexDomain):
    """The fixed triangle {(x, y): -1/2 <= y <= 1/2 - |x|}."""

    @property
    def dim(self):
        return 2

    def contains_batch(self, X, tol=CONTAINS_TOL):
        X = np.asarray(X, dtype=float)
        return (X[:, 1] >= -0.5 - tol) & (X[:, 1] + np.abs(X[:, 0]) <= 0.5 + tol)

    def bounding_box(self):
        return np.array([-1.0, -0.5]), np.array([1.0, 0.5])

    def project_batch(self, X):
        X = np.asarray(X, dtype=float)
        out = X.copy()
        outside = ~self.contains_batch(X, tol=0.0)
        if not np.any(outside):
            return out
        P = X[outside]
        best = None
        best_d = None
        for i, j in _TRI_EDGES:
            Q = _project_segment_batch(P, _TRI_VERTS[i], _TRI_VERTS[j])
            d = np.sum((P - Q) ** 2, axis=1)
            if best is None:
                best, best_d = Q, d
            else:
                closer = d < best_d
                best[closer] = Q[closer]
                best_d = np.minimum(best_d, d)
        out[outside] = best
        return out

    def label(self):
        return "triangle"


def _project_segment_batch(P, a, b):
    u = b - a
    t = np.clip((P - a) @ u / (u @ u), 0.0, 1.0)
    return a + t[:, None] * u


@dataclasses.dataclass(frozen=True, eq=False)
class HalfspaceIntersection(ConvexDomain):
    """{x : normals @ x <= offsets}; must be nonempty and bounded.

    Boundedness and the bounding box are certified at construction with one
    linear program per coordinate direction.
    """

    normals: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        N = np.asarray(self.normals, dtype=float)
        o = np.asarray(self.offsets, dtype=float)
        if N.ndim != 2 or o.ndim != 1 or N.shape[0] != o.shape[0]:
            raise ValueError("need normals (m, d) with matching offsets (m,)")
        if not (np.all(np.isfinite(N)) and np.all(np.isfinite(o))):
            raise ValueError("halfspace data must be finite")
        object.__setattr__(self, "normals", N)
        object.__setattr__(self, "offsets", o)
        object.__setattr__(self, "_bbox", self._solve_bounding_box())

    def _solve_bounding_box(self):
        from scipy.optimize import linprog
        d = self.normals.shape[1]
        lo = np.empty(d)
        hi = np.empty(d)
        for i in range(d):
            c = np.zeros(d)
            for sign, dest in ((1.0, lo), (-1.0, hi)):
                c[i] = sign
                res = linprog(c, A_ub=self.normals, b_ub=self.offsets,
                              bounds=[(None, None)] * d, method="highs")
                if res.status == 3:
                    raise ValueError("halfspace intersection is unbounded")
                if res.status != 0:
                    raise ValueError("halfspace intersection is empty")
                dest[i] = sign * res.fun
            c[i] = 0.0
        return lo, hi

    @property
    def dim(self):
        return self.normals.shape[1]

    def contains_batch(self, X, tol=CONTAINS_TOL):
        X = np.asarray(X, dtype=float)
        return np.all(X @ self.normals.T <= self.offsets + tol, axis=1)

    def bounding_box(self):
        lo, hi = self._bbox
        return lo.copy(), hi.copy()

    def project_batch(self, X):
        X = np.asarray(X, dtype=float)
        return np.array([self._project_one(x) for x in X])

    def _project_one(self, x):
        """Exact projection by enumerating candidate active sets.

        The projection lies on some face; with S its active constraints it
        equals the least-squares projection of x onto {z: N_S z = o_S}. All
        subsets up to size d are tried and the nearest feasible candidate
        wins. Intended for the handful of halfspaces a desk-scale domain has.
        """
        if self.contains(x):
            return x.copy()
        N, o = self.normals, self.offsets
        m, d = N.shape
        if m > 14:
            raise ValueError("too many halfspaces for exact projection")
        best = None
        best_d = np.inf
        for k in range(1, d + 1):
            for S in itertools.combinations(range(m), k):
                A = N[list(S)]
                rhs = A @ x - o[list(S)]
                corr, *_ = np.linalg.lstsq(A, rhs, rcond=None)
                z = x - corr
                if np.max(np.abs(A @ z - o[list(S)])) > 1e-9:
                    continue  # inconsistent active set
                if not self.contains(z, tol=1e-9):
                    continue
                dist = float(np.sum((z - x) ** 2))
                if dist < best_d:
                    best, best_d = z, dist
        if best is None:
            raise RuntimeError("projection enumeration found no feasible face")
        return best

    def label(self):
        return f"halfspaces(m={self.normals.shape[0]})"


def domain_contains(domain: ConvexDomain, x, tol=CONTAINS_TOL) -> bool:
    """Membership with slack; raises on dimension mismatch."""
    return domain.contains(x, tol=tol)
