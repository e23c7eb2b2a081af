"""Norm geometries: values, Minkowski gauges, and duality functionals.

Supported norms on R^d (coordinates as plain float64 arrays):

* ``euclidean``    sqrt(sum x_i^2)
* ``l1``           sum |x_i|
* ``linf``         max |x_i|
* ``pnorm``        (sum |x_i|^p)^(1/p), p > 1
* ``rounded_linf`` 2-D Minkowski gauge of the unit square with each corner
                   replaced by a circular arc of radius r tangent to both
                   adjacent sides (arc centers at (+-(1-r), +-(1-r))).
                   Equivalently the gauge of [-(1-r), 1-r]^2 thickened by a
                   radius-r disk, hence a genuine norm, C^1 away from 0.

The duality functional of a nonzero x is the unique covector l with dual
norm 1 and l(x) = ||x||; for smooth norms it is the gradient of the norm at
x. For l1/linf a deterministic subgradient selection is returned and marked
non-smooth.

All functions are pure; everything is safe to call concurrently.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

_KINDS = ("euclidean", "l1", "linf", "pnorm", "rounded_linf")


def as_vector(x, dim=None) -> np.ndarray:
    """Coerce to a finite 1-D float array, optionally checking its length."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D point, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise ValueError("point has non-finite coordinates")
    return v


@dataclasses.dataclass(frozen=True)
class NormSpec:
    """Tagged norm geometry. ``p`` is used by pnorm, ``r`` by rounded_linf."""

    kind: str
    p: float | None = None
    r: float | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}")
        if self.kind == "pnorm":
            if self.p is None or not (self.p > 1.0):
                raise ValueError("p-norm requires p > 1")
        elif self.kind == "rounded_linf":
            if self.r is None or not (0.0 < self.r <= 0.5):
                raise ValueError("corner radius must lie in (0, 1/2]")
        elif self.p is not None or self.r is not None:
            raise ValueError(f"{self.kind} norm takes no parameters")

    @property
    def smooth(self) -> bool:
        return self.kind in ("euclidean", "pnorm", "rounded_linf")

    def label(self) -> str:
        if self.kind == "pnorm":
            return f"pnorm({self.p:g})"
        if self.kind == "rounded_linf":
            return f"rounded_linf({self.r:g})"
        return self.kind

    @classmethod
    def euclidean(cls):
        return cls("euclidean")

    @classmethod
    def l1(cls):
        return cls("l1")

    @classmethod
    def linf(cls):
        return cls("linf")

    @classmethod
    def pnorm(cls, p):
        return cls("pnorm", p=float(p))

    @classmethod
    def rounded_linf(cls, r):
        return cls("rounded_linf", r=float(r))


@dataclasses.dataclass(frozen=True, eq=False)
class Covector:
    """Linear functional given by coordinate coefficients.

    ``smooth`` is False when the coefficients are a subgradient selection of
    a non-differentiable norm; such covectors must not be fed into
    smooth-norm-only diagnostics.
    """

    coeffs: np.ndarray
    smooth: bool = True

    def __call__(self, v) -> float:
        return float(np.dot(self.coeffs, np.asarray(v, dtype=float)))


def norm_value(spec: NormSpec, v) -> float:
    """Value of the norm at a single point."""
    v = as_vector(v)
    return float(norm_value_batch(spec, v[None, :])[0])


def norm_value_batch(spec: NormSpec, X) -> np.ndarray:
    """Norm values for rows of X, shape (n, d) -> (n,)."""
    X = np.asarray(X, dtype=float)
    if spec.kind == "euclidean":
        return np.sqrt(np.sum(X * X, axis=1))
    if spec.kind == "l1":
        return np.sum(np.abs(X), axis=1)
    if spec.kind == "linf":
        return np.max(np.abs(X), axis=1)
    if spec.kind == "pnorm":
        return np.sum(np.abs(X) ** spec.p, axis=1) ** (1.0 / spec.p)
    return _rounded_gauge_batch(spec.r, X)


def _rounded_gauge_batch(r, X):
    """Gauge of the corner-rounded square, rows of a (n, 2) array.

    Flat faces: where min(|x|,|y|) <= (1-r)*max, the gauge is max(|x|,|y|).
    Corner region: the gauge solves a*t^2 - b*t + c = 0 with
    a = 2(1-r)^2 - r^2, b = 2(1-r)(|x|+|y|), c = |x|^2+|y|^2; the boundary
    point x/t lies on the arc, which is the smaller root (a >= 1/4 for
    r <= 1/2).
    """
    if X.shape[1] != 2:
        raise ValueError("rounded sup-norm gauge is defined in dimension 2")
    ax = np.abs(X)
    mx = np.max(ax, axis=1)
    mn = np.min(ax, axis=1)
    a = 2.0 * (1.0 - r) ** 2 - r * r
    b = 2.0 * (1.0 - r) * (ax[:, 0] + ax[:, 1])
    c = ax[:, 0] ** 2 + ax[:, 1] ** 2
    disc = np.maximum(b * b - 4.0 * a * c, 0.0)
    with np.errstate(invalid="ignore"):
        t_arc = (b - np.sqrt(disc)) / (2.0 * a)
    return np.where(mn <= (1.0 - r) * mx, mx, t_arc)


def dual_norm(spec: NormSpec, coeffs) -> float:
    """Norm of a covector in the dual of ``spec``.

    The dual of the rounded gauge follows from its unit ball being the
    Minkowski sum of the square [-(1-r), 1-r]^2 and a radius-r disk, whose
    support function is (1-r)*||.||_1 + r*||.||_2.
    """
    c = as_vector(coeffs)
    if spec.kind == "euclidean":
        return float(np.sqrt(np.sum(c * c)))
    if spec.kind == "l1":
        return float(np.max(np.abs(c)))
    if spec.kind == "linf":
        return float(np.sum(np.abs(c)))
    if spec.kind == "pnorm":
        q = spec.p / (spec.p - 1.0)
        return float(np.sum(np.abs(c) ** q) ** (1.0 / q))
    r = spec.r
    return float((1.0 - r) * np.sum(np.abs(c)) + r * np.sqrt(np.sum(c * c)))


def duality_functional(spec: NormSpec, x) -> Covector:
    """The covector l_x with ||l_x||_* = 1 and l_x(x) = ||x||.

    Smooth norms: the gradient of the norm at x (unique supporting
    functional). l1: the sign vector, zero coordinates kept at 0. linf: the
    signed indicator of the first maximal coordinate. Undefined at 0.
    """
    x = as_vector(x)
    if not np.any(x != 0.0):
        raise ValueError("duality functional undefined at origin")
    if spec.kind == "l1":
        s = np.sign(x)
        return Covector(s / np.max(np.abs(s)), smooth=False)
    if spec.kind == "linf":
        i = int(np.argmax(np.abs(x)))
        e = np.zeros_like(x)
        e[i] = math.copysign(1.0, x[i])
        return Covector(e, smooth=False)
    return Covector(duality_batch(spec, x[None, :])[0], smooth=True)


def duality_batch(spec: NormSpec, W) -> np.ndarray:
    """Gradient covectors of a smooth norm for rows of W, shape (n, d).

    Rows must be nonzero; only smooth kinds are accepted.
    """
    if not spec.smooth:
        raise ValueError(f"{spec.label()} is not smooth; no gradient covectors")
    W = np.asarray(W, dtype=float)
    if spec.kind == "euclidean":
        n = np.sqrt(np.sum(W * W, axis=1))
        return W / n[:, None]
    if spec.kind == "pnorm":
        p = spec.p
        n = np.sum(np.abs(W) ** p, axis=1) ** (1.0 / p)
        return np.sign(W) * np.abs(W) ** (p - 1.0) / (n ** (p - 1.0))[:, None]
    return _rounded_gradient_batch(spec.r, W)


def _rounded_gradient_batch(r, W):
    """Gradient of the rounded gauge: face normal or arc normal, scaled so
    that the pairing with W equals the gauge value (Euler's identity)."""
    if W.shape[1] != 2:
        raise ValueError("rounded sup-norm gauge is defined in dimension 2")
    aw = np.abs(W)
    mx = np.max(aw, axis=1)
    mn = np.min(aw, axis=1)
    flat = mn <= (1.0 - r) * mx
    out = np.empty_like(W)
    # flat faces: signed indicator of the dominant coordinate
    dom = np.argmax(aw, axis=1)
    out[:, 0] = np.where(dom == 0, np.sign(W[:, 0]), 0.0)
    out[:, 1] = np.where(dom == 1, np.sign(W[:, 1]), 0.0)
    if np.all(flat):
        return out
    # corner arcs: grad t = (x - t*q) / (sqrt(disc)/2), q = (1-r)*sign(x)
    V = W[~flat]
    av = np.abs(V)
    a = 2.0 * (1.0 - r) ** 2 - r * r
    b = 2.0 * (1.0 - r) * (av[:, 0] + av[:, 1])
    c = av[:, 0] ** 2 + av[:, 1] ** 2
    disc = np.maximum(b * b - 4.0 * a * c, 0.0)
    t = (b - np.sqrt(disc)) / (2.0 * a)
    denom = np.sqrt(disc) / 2.0
    q = (1.0 - r) * np.sign(V)
    out[~flat] = (V - t[:, None] * q) / denom[:, None]
    return out


@dataclasses.dataclass(frozen=True)
class DualityReport:
    """Numerical audit of the defining properties of a duality functional."""

    pairing_err: float
    dual_norm_excess: float
    n_dirs: int
    seed: int


def sample_unit_ball(spec: NormSpec, dim, n, rng) -> np.ndarray:
    """n points of the closed unit ball of ``spec``, by rejection from the
    bounding cube [-1, 1]^d (every supported unit ball sits inside it)."""
    out = np.empty((n, dim))
    have = 0
    while have < n:
        cand = rng.uniform(-1.0, 1.0, size=(2 * (n - have) + 8, dim))
        keep = cand[norm_value_batch(spec, cand) <= 1.0]
        take = min(n - have, keep.shape[0])
        out[have:have + take] = keep[:take]
        have += take
    return out


def duality_check(spec: NormSpec, x, n_dirs=1000, seed=0) -> DualityReport:
    """Check l_x(x) = ||x|| and l_x(u) <= ||u|| on sampled ball directions.

    ``dual_norm_excess`` is max(l_x(u) - ||u||) over the sample; it must be
    <= 0 up to rounding exactly when the dual norm of l_x is at most 1.
    """
    x = as_vector(x)
    ell = duality_functional(spec, x)
    pairing_err = abs(ell(x) - norm_value(spec, x))
    rng = np.random.default_rng(seed)
    U = sample_unit_ball(spec, x.shape[0], n_dirs, rng)
    excess = np.dot(U, ell.coeffs) - norm_value_batch(spec, U)
    return DualityReport(pairing_err=float(pairing_err),
                         dual_norm_excess=float(np.max(excess)),
                         n_dirs=n_dirs, seed=seed)
