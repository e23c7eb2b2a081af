"""Contraction solves and the lam -> 1 continuation.

For each lam in (0, 1) the map y -> lam*f(y) + (1-lam)*anchor is a
lam-contraction of the domain into itself and its fixed point is found by
plain iteration. The stopping rule ``step <= tol*(1-lam)`` turns the
geometric-series bound ||y_k - y*|| <= step*lam/(1-lam) into a uniform
distance guarantee of about tol at every lam, at an iteration cost growing
like 1/(1-lam). Steps are measured in the Euclidean norm throughout: the
fixed point itself is norm-independent, and all norms here are equivalent.

Continuations warm-start each solve from the previous fixed point, which
makes late-ladder solves cheap. Encodable maps run on the compiled kernel
when it is available; everything else uses the generic Python driver.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from . import _kernel
from .geometry import NormSpec, as_vector, norm_value
from .maps import MapSpec, lower


# ---------------------------------------------------------------------------
# lambda schedules
# ---------------------------------------------------------------------------

class LambdaSchedule:
    """Strictly increasing lam values in (0, 1)."""

    def lambdas(self) -> np.ndarray:
        raise NotImplementedError


@dataclasses.dataclass(frozen=True)
class GeometricSchedule(LambdaSchedule):
    """lam_k = 1 - rho^k for k = 1..k_max."""

    rho: float
    k_max: int

    def __post_init__(self):
        if not (0.0 < self.rho < 1.0):
            raise ValueError("rho must lie in (0, 1)")
        if self.k_max < 1:
            raise ValueError("k_max must be at least 1")

    def lambdas(self):
        return 1.0 - self.rho ** np.arange(1, self.k_max + 1, dtype=float)


@dataclasses.dataclass(frozen=True)
class LogSpacedSchedule(LambdaSchedule):
    """lam = 1 - exp(-s) on the uniform grid s = s_min, s_min+step, ..., s_max.

    Uniform sampling of s = -ln(1-lam) is what resolves log-periodic
    oscillation along the path.
    """

    s_min: float
    s_max: float
    step: float

    def __post_init__(self):
        if not (self.s_min > 0.0 and self.step > 0.0 and self.s_max >= self.s_min):
            raise ValueError("need 0 < s_min <= s_max and step > 0")

    def lambdas(self):
        n = int(math.floor((self.s_max - self.s_min) / self.step + 1e-9)) + 1
        s = self.s_min + self.step * np.arange(n, dtype=float)
        return 1.0 - np.exp(-s)


@dataclasses.dataclass(frozen=True)
class ExplicitSchedule(LambdaSchedule):
    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("schedule must not be empty")
        if any(not (0.0 < v < 1.0) for v in vals):
            raise ValueError("schedule values must lie in (0, 1)")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("schedule must be strictly increasing")
        object.__setattr__(self, "values", vals)

    def lambdas(self):
        return np.asarray(self.values, dtype=float)


# ---------------------------------------------------------------------------
# solve records
# ---------------------------------------------------------------------------

@dataclasses.dataclass(frozen=True, eq=False)
class SolveReport:
    """One contraction solve: y solves y = lam*f(y) + (1-lam)*anchor.

    ``x = y/lam`` rescales back to the fixed point of x -> f(lam*x) when the
    anchor is 0. ``residual`` is the last step length, so it is at most
    tol*(1-lam); ``error_bound`` is the geometric-series distance bound
    residual*lam/(1-lam).
    """

    lam: float
    y: np.ndarray
    x: np.ndarray
    iterations: int
    residual: float
    error_bound: float


@dataclasses.dataclass
class Trajectory:
    map: MapSpec
    map_id: str
    norm: NormSpec
    anchor: np.ndarray
    tol: float
    reports: list

    def lambdas(self):
        return np.array([r.lam for r in self.reports])

    def ys(self):
        return np.array([r.y for r in self.reports])

    def xs(self):
        return np.array([r.x for r in self.reports])


class NonconvergenceError(RuntimeError):
    """Raised when a contraction solve exhausts max_iter; signals violated
    hypotheses rather than a schedule effect."""

    def __init__(self, lam, iterations, last_step, last_y, partial=None):
        super().__init__(f"no convergence at lam={lam:.17g} after "
                         f"{iterations} iterations (last step {last_step:.3e})")
        self.lam = lam
        self.iterations = iterations
        self.last_step = last_step
        self.last_y = last_y
        self.partial = partial


def default_max_iter(lam) -> int:
    """ceil(60/(1-lam)): covers tolerances down to 1e-12 at contraction
    factor lam."""
    return int(math.ceil(60.0 / (1.0 - lam)))


# ---------------------------------------------------------------------------
# solves
# ---------------------------------------------------------------------------

def _iterate(map_spec, lam, anchor, y0, tol_step, max_iter, backend=None):
    prog = lower(map_spec)
    if prog is not None:
        impl = _kernel if backend is None else _kernel.get_backend(backend)
        if impl is not None:
            return impl.run_contraction(
                np.ascontiguousarray(prog), map_spec.dim, float(lam),
                np.ascontiguousarray(anchor, dtype=float),
                np.ascontiguousarray(y0, dtype=float),
                float(tol_step), int(max_iter))
    one_m = 1.0 - lam
    y = np.array(y0, dtype=float)
    step = math.inf
    it = 0
    while it < max_iter:
        it += 1
        ynew = lam * map_spec._apply_batch(y[None, :])[0] + one_m * anchor
        step = float(np.linalg.norm(ynew - y))
        y = ynew
        if step <= tol_step:
            break
    return y, it, step


def _solve(map_spec, lam, anchor, x0, tol, max_iter, backend=None):
    if not (0.0 < lam < 1.0):
        raise ValueError("lam must lie in (0, 1)")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    anchor = as_vector(anchor, map_spec.dim)
    if not map_spec.domain.contains(anchor):
        raise ValueError("anchor outside the map's domain")
    x0 = anchor if x0 is None else as_vector(x0, map_spec.dim)
    if not map_spec.domain.contains(x0):
        raise ValueError("start point outside the map's domain")
    if max_iter is None:
        max_iter = default_max_iter(lam)
    tol_step = tol * (1.0 - lam)
    y, iters, step = _iterate(map_spec, lam, anchor, x0, tol_step, max_iter,
                              backend=backend)
    if step > tol_step:
        raise NonconvergenceError(lam, iters, step, y)
    return SolveReport(lam=float(lam), y=y, x=y / lam, iterations=iters,
                       residual=step,
                       error_bound=step * lam / (1.0 - lam))


def solve_lambda(map_spec: MapSpec, lam, x0=None, tol=1e-9, max_iter=None,
                 backend=None) -> SolveReport:
    """Fixed point of y -> lam*f(y), iterated from x0 (default 0)."""
    return _solve(map_spec, lam, np.zeros(map_spec.dim), x0, tol, max_iter,
                  backend=backend)


def solve_anchored(map_spec: MapSpec, lam, anchor, x0=None, tol=1e-9,
                   max_iter=None, backend=None) -> SolveReport:
    """Fixed point of y -> lam*f(y) + (1-lam)*anchor, iterated from x0
    (default: the anchor)."""
    return _solve(map_spec, lam, as_vector(anchor, map_spec.dim), x0, tol,
                  max_iter, backend=backend)


def continuation(map_spec: MapSpec, schedule: LambdaSchedule, tol=1e-9,
                 max_iter=None, anchor=None, norm=None, map_id=None,
                 backend=None) -> Trajectory:
    """Warm-started solves along the schedule; sequential by contract."""
    anchor = (np.zeros(map_spec.dim) if anchor is None
              else as_vector(anchor, map_spec.dim))
    norm = norm or NormSpec.euclidean()
    traj = Trajectory(map=map_spec, map_id=map_id or map_spec.label(),
                      norm=norm, anchor=anchor, tol=tol, reports=[])
    start = None
    for lam in schedule.lambdas():
        try:
            rep = _solve(map_spec, lam, anchor, start, tol, max_iter,
                         backend=backend)
        except NonconvergenceError as err:
            err.partial = traj
            raise
        traj.reports.append(rep)
        start = rep.y
    return traj


def retraction_grid(map_spec: MapSpec, anchors, schedule: LambdaSchedule,
                    tol=1e-9, max_iter=None, backend=None) -> list:
    """Terminal anchored-continuation point for each anchor, in input order.

    The terminal point approximates the fixed point the anchored path
    converges to; the anchor -> value map is a retraction onto Fix(f).
    """
    out = []
    for a in np.asarray(anchors, dtype=float):
        traj = continuation(map_spec, schedule, tol=tol, max_iter=max_iter,
                            anchor=a, backend=backend)
        out.append((a, traj.reports[-1].y))
    return out


def grid_anchors(domain, counts) -> np.ndarray:
    """Regular grid over the domain bounding box, off-domain nodes skipped."""
    lo, hi = domain.bounding_box()
    if len(counts) != domain.dim:
        raise ValueError("need one grid count per dimension")
    axes = [np.linspace(lo[i], hi[i], int(c)) for i, c in enumerate(counts)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.column_stack([m.ravel() for m in mesh])
    return pts[domain.contains_batch(pts)]


def contraction_steps(map_spec: MapSpec, lam, x0=None, anchor=None, tol=1e-9,
                      max_iter=None, step_norm=None) -> list:
    """Step lengths of one solve, measured in ``step_norm`` (default the
    Euclidean norm). The stopping rule is unchanged; this instruments the
    generic driver to certify the per-step contraction factor."""
    step_norm = step_norm or NormSpec.euclidean()
    anchor = (np.zeros(map_spec.dim) if anchor is None
              else as_vector(anchor, map_spec.dim))
    y = anchor.copy() if x0 is None else as_vector(x0, map_spec.dim).copy()
    if max_iter is None:
        max_iter = default_max_iter(lam)
    tol_step = tol * (1.0 - lam)
    steps = []
    for _ in range(max_iter):
        ynew = lam * map_spec._apply_batch(y[None, :])[0] + (1.0 - lam) * anchor
        diff = ynew - y
        steps.append(norm_value(step_norm, diff))
        y = ynew
        if float(np.linalg.norm(diff)) <= tol_step:
            return steps
    raise NonconvergenceError(lam, max_iter, steps[-1], y)
