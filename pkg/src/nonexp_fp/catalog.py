"""Built-in experiment maps and their behavior manifests.

A manifest records what is supposed to happen for each built-in: which norms
the map is nonexpansive in, whether the Euclidean monotonicity bracket is
expected to hold, whether its fixed set is convex, and whether the
contraction path diverges. The CLI check suite treats a reproduced expected
failure (for the counterexample maps) as success.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .domains import Ball, Box
from .geometry import NormSpec
from .maps import (AbsAffineProfile, AffineMap, CoordClampMap,
                   EuclideanProjectionMap, GraphProjectionMap, MapSpec,
                   OscillatingShearMap, ShearProfile, calibrate_amplitude)


@dataclasses.dataclass(frozen=True)
class BuiltinManifest:
    name: str
    summary: str
    norm: NormSpec                      # default experiment norm
    norms_1lip: tuple                   # norms under which the map is 1-Lipschitz
    euclidean_nonexpansive: bool        # Euclidean monotone bracket expected >= 0
    fix_convex: bool                    # convexity probe expected clean
    diverges: bool                      # contraction path has no limit
    divergence_floor: float | None = None   # certified tail diameter when it does
    zero_fixed: bool = False            # f(0) = 0, so the whole path is 0

    def to_dict(self):
        return {
            "name": self.name,
            "summary": self.summary,
            "norm": self.norm.label(),
            "norms_1lip": [n.label() for n in self.norms_1lip],
            "euclidean_nonexpansive": self.euclidean_nonexpansive,
            "fix_convex": self.fix_convex,
            "diverges": self.diverges,
            "divergence_floor": self.divergence_floor,
            "zero_fixed": self.zero_fixed,
        }


def oscillating_shear(alpha=0.5, eps0=None, safety=0.9):
    """Triangle shear whose contraction path oscillates forever (l1 norm)."""
    alpha = float(alpha)
    if eps0 is None:
        eps0 = calibrate_amplitude(alpha, safety=safety)
    m = OscillatingShearMap(ShearProfile(alpha=alpha, eps0=float(eps0)))
    manifest = BuiltinManifest(
        name="oscillating_shear",
        summary="triangle shear with log-oscillating amplitude; the "
                "contraction path sweeps eps0*sin(ln(1-lam)) and has no limit",
        norm=NormSpec.l1(),
        norms_1lip=(NormSpec.l1(),),
        euclidean_nonexpansive=False,
        fix_convex=True,
        diverges=True,
        divergence_floor=1.5 * float(eps0),
    )
    return m, manifest


def graph_projection(offset=0.3, slope=0.4, rounding=0.5):
    """Vertical projection onto an abs-affine graph (sup norm, rounded gauge)."""
    m = GraphProjectionMap(AbsAffineProfile(offset=float(offset), slope=float(slope)))
    manifest = BuiltinManifest(
        name="graph_projection",
        summary="vertical projection onto a vee-shaped graph; fixed set is "
                "the graph, not convex; path converges to (0, g(0))",
        norm=NormSpec.rounded_linf(float(rounding)),
        norms_1lip=(NormSpec.linf(), NormSpec.rounded_linf(float(rounding))),
        euclidean_nonexpansive=False,
        fix_convex=False,
        diverges=False,
        zero_fixed=False,
    )
    return m, manifest


def disk_projection(center=(0.6, 0.8), radius=0.3, halfwidth=1.5):
    """Euclidean projection onto a disk; the path limit is the nearest disk
    point to the anchor."""
    center = np.asarray(center, dtype=float)
    target = Ball(center, float(radius))
    lo = np.full(center.shape[0], -float(halfwidth))
    m = EuclideanProjectionMap(target=target, domain=Box(lo, -lo))
    manifest = BuiltinManifest(
        name="disk_projection",
        summary="nearest-point projection onto a disk off the origin",
        norm=NormSpec.euclidean(),
        norms_1lip=(NormSpec.euclidean(),),
        euclidean_nonexpansive=True,
        fix_convex=True,
        diverges=False,
    )
    return m, manifest


def coord_clamp(lo=(0.2, -0.5), hi=(0.8, 0.5), halfwidth=1.0):
    """Coordinatewise clamp; nonexpansive in every p-norm."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    box_lo = np.full(lo.shape[0], -float(halfwidth))
    m = CoordClampMap(lo=lo, hi=hi, domain=Box(box_lo, -box_lo))
    manifest = BuiltinManifest(
        name="coord_clamp",
        summary="componentwise clamp onto a box; path limit is the clamp of "
                "the anchor",
        norm=NormSpec.pnorm(4.0),
        norms_1lip=(NormSpec.euclidean(), NormSpec.pnorm(4.0),
                    NormSpec.l1(), NormSpec.linf()),
        euclidean_nonexpansive=True,
        fix_convex=True,
        diverges=False,
    )
    return m, manifest


def rotation(theta_deg=30.0):
    """Rotation of the unit disk about the origin; f(0) = 0."""
    th = math.radians(float(theta_deg))
    A = np.array([[math.cos(th), -math.sin(th)],
                  [math.sin(th), math.cos(th)]])
    m = AffineMap(matrix=A, offset=np.zeros(2),
                  domain=Ball(np.zeros(2), 1.0), norm=NormSpec.euclidean())
    manifest = BuiltinManifest(
        name="rotation",
        summary="rotation about the fixed origin; the whole path is 0",
        norm=NormSpec.euclidean(),
        norms_1lip=(NormSpec.euclidean(),),
        euclidean_nonexpansive=True,
        fix_convex=True,
        diverges=False,
        zero_fixed=True,
    )
    return m, manifest


_FACTORIES = {
    "oscillating_shear": oscillating_shear,
    "graph_projection": graph_projection,
    "disk_projection": disk_projection,
    "coord_clamp": coord_clamp,
    "rotation": rotation,
}


def builtin_names():
    return sorted(_FACTORIES)


def build_builtin(name, **params) -> tuple[MapSpec, BuiltinManifest]:
    if name not in _FACTORIES:
        raise ValueError(f"unknown built-in map {name!r}; "
                         f"known: {', '.join(builtin_names())}")
    return _FACTORIES[name](**params)


def manifests():
    return [build_builtin(name)[1] for name in builtin_names()]
