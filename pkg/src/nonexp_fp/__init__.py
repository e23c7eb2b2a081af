"""Fixed points of nonexpansive self-maps by contraction continuation.

For a 1-Lipschitz map f of a convex compact set containing 0, each
lam in (0, 1) gives a contraction y -> lam*f(y) with a unique fixed point
y_lam. This package solves those contractions, drives lam -> 1, and verifies
(or refutes, for the purpose-built counterexamples) convergence of the
family, together with the norm-geometry diagnostics that characterize the
limit through duality functionals.
"""

from ._kernel import BACKEND as KERNEL_BACKEND
from .catalog import BuiltinManifest, build_builtin, builtin_names, manifests
from .diagnostics import (CheckReport, DivergenceReport, FixSample,
                          check_duality_audit, check_duality_monotone,
                          check_monotone, check_norm_monotone,
                          check_variational_limit, convexity_probe,
                          detect_divergence, extend_sample,
                          refine_fixed_point, residual_bounds,
                          sample_fixed_points, uniqueness_probe)
from .domains import (Ball, Box, ConvexDomain, HalfspaceIntersection,
                      TriangleT, domain_contains)
from .geometry import (Covector, DualityReport, NormSpec, dual_norm,
                       duality_check, duality_functional, norm_value,
                       norm_value_batch)
from .maps import (AbsAffineProfile, AffineMap, CompositionMap,
                   ConvexCombinationMap, CoordClampMap, EuclideanProjectionMap,
                   GraphProjectionMap, MapSpec, OscillatingShearMap,
                   ShearProfile, calibrate_amplitude, gap_from_height,
                   height_from_gap, lipschitz_estimate, log_oscillation,
                   map_eval)
from .solver import (ExplicitSchedule, GeometricSchedule, LambdaSchedule,
                     LogSpacedSchedule, NonconvergenceError, SolveReport,
                     Trajectory, continuation, contraction_steps,
                     grid_anchors, retraction_grid, solve_anchored,
                     solve_lambda)

__version__ = "0.1.0"
