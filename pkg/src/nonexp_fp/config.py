"""JSON experiment configuration -> library objects.

A config names a map, an experiment norm, a lambda schedule, and the knobs of
the diagnostics suite. Malformed configs raise ConfigError, which the CLI
turns into exit code 2.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np

from . import catalog
from .catalog import BuiltinManifest
from .domains import Ball, Box, ConvexDomain, HalfspaceIntersection, TriangleT
from .geometry import NormSpec
from .maps import (AffineMap, CompositionMap, ConvexCombinationMap,
                   CoordClampMap, EuclideanProjectionMap, MapSpec)
from .solver import (ExplicitSchedule, GeometricSchedule, LambdaSchedule,
                     LogSpacedSchedule)


class ConfigError(ValueError):
    pass


def load_json(path) -> dict:
    try:
        with open(path, "r") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    return raw


def _kind(obj, what):
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ConfigError(f"{what} descriptor needs a 'kind' field")
    return obj["kind"], {k: v for k, v in obj.items() if k != "kind"}


def parse_norm(obj) -> NormSpec:
    kind, params = _kind(obj, "norm")
    try:
        if kind == "pnorm":
            return NormSpec.pnorm(params.pop("p"))
        if kind == "rounded_linf":
            return NormSpec.rounded_linf(params.pop("r"))
        if params:
            raise ConfigError(f"norm {kind!r} takes no parameters")
        return NormSpec(kind)
    except KeyError as exc:
        raise ConfigError(f"norm {kind!r} is missing parameter {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def parse_domain(obj) -> ConvexDomain:
    kind, params = _kind(obj, "domain")
    try:
        if kind == "box":
            return Box(np.asarray(params["lo"], float),
                       np.asarray(params["hi"], float))
        if kind == "ball":
            return Ball(np.asarray(params["center"], float), params["radius"])
        if kind == "triangle":
            return TriangleT()
        if kind == "halfspaces":
            return HalfspaceIntersection(np.asarray(params["normals"], float),
                                         np.asarray(params["offsets"], float))
    except KeyError as exc:
        raise ConfigError(f"domain {kind!r} is missing field {exc}") from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown domain kind {kind!r}")


def parse_map(obj) -> tuple[MapSpec, BuiltinManifest]:
    kind, params = _kind(obj, "map")
    try:
        if kind in catalog.builtin_names():
            return catalog.build_builtin(kind, **params)
        if kind == "euclidean_projection":
            m = EuclideanProjectionMap(target=parse_domain(params["target"]),
                                       domain=parse_domain(params["domain"]))
            return m, _custom_manifest(kind, euclidean_nonexpansive=True)
        if kind == "coord_clamp_custom":
            m = CoordClampMap(lo=np.asarray(params["lo"], float),
                              hi=np.asarray(params["hi"], float),
                              domain=parse_domain(params["domain"]))
            return m, _custom_manifest(kind, euclidean_nonexpansive=True)
        if kind == "affine":
            norm = parse_norm(params.get("norm", {"kind": "euclidean"}))
            m = AffineMap(matrix=np.asarray(params["matrix"], float),
                          offset=np.asarray(params["offset"], float),
                          domain=parse_domain(params["domain"]), norm=norm)
            eucl = float(np.linalg.norm(m.matrix, 2)) <= 1.0 + 1e-9
            return m, _custom_manifest(kind, norm=norm,
                                       euclidean_nonexpansive=eucl)
        if kind in ("composition", "convex_combination"):
            parts = []
            manifests = []
            for sub in params["parts"]:
                sm, sman = parse_map(sub)
                parts.append(sm)
                manifests.append(sman)
            eucl = all(man.euclidean_nonexpansive for man in manifests)
            if kind == "composition":
                m = CompositionMap(parts=tuple(parts))
            else:
                m = ConvexCombinationMap(weights=np.asarray(params["weights"],
                                                            float),
                                         parts=tuple(parts))
            return m, _custom_manifest(kind, euclidean_nonexpansive=eucl)
    except KeyError as exc:
        raise ConfigError(f"map {kind!r} is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown map kind {kind!r}; built-ins: "
                      + ", ".join(catalog.builtin_names()))


def _custom_manifest(kind, norm=None, euclidean_nonexpansive=True):
    norm = norm or NormSpec.euclidean()
    lip = (norm,) if norm.kind == "euclidean" or not euclidean_nonexpansive \
        else (NormSpec.euclidean(), norm)
    return BuiltinManifest(
        name=kind, summary="user-configured map", norm=norm, norms_1lip=lip,
        euclidean_nonexpansive=euclidean_nonexpansive, fix_convex=True,
        diverges=False)


def parse_schedule(obj) -> LambdaSchedule:
    kind, params = _kind(obj, "schedule")
    try:
        if kind == "geometric":
            return GeometricSchedule(rho=float(params["rho"]),
                                     k_max=int(params["k_max"]))
        if kind == "log_spaced":
            return LogSpacedSchedule(s_min=float(params["s_min"]),
                                     s_max=float(params["s_max"]),
                                     step=float(params["step"]))
        if kind == "explicit":
            return ExplicitSchedule(values=tuple(params["values"]))
    except KeyError as exc:
        raise ConfigError(f"schedule {kind!r} is missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown schedule kind {kind!r}")


@dataclasses.dataclass
class ExperimentConfig:
    map: MapSpec
    manifest: BuiltinManifest
    norm: NormSpec
    schedule: LambdaSchedule | None
    anchor: np.ndarray
    tol: float
    fix_tol: float
    vi_tol: float
    max_iter: int | None
    seed: int
    n_pairs: int
    n_starts: int
    n_midpoints: int
    n_dirs: int
    prefix: str
    svg: bool
    out_dir: str | None
    retract_counts: tuple | None
    retract_schedule: LambdaSchedule


def build_config(raw: dict, seed=None, out_dir=None, svg=None) -> ExperimentConfig:
    """Validate a raw JSON dict; keyword arguments override config fields.

    Every malformed field becomes a ConfigError, never a traceback.
    """
    try:
        return _build_config(raw, seed, out_dir, svg)
    except ConfigError:
        raise
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"malformed config value: {exc}") from exc


def _build_config(raw, seed, out_dir, svg):
    if "map" not in raw:
        raise ConfigError("config needs a 'map' descriptor")
    map_spec, manifest = parse_map(raw["map"])
    norm = parse_norm(raw["norm"]) if "norm" in raw else manifest.norm
    if norm.kind == "rounded_linf" and map_spec.dim != 2:
        raise ConfigError("the rounded sup gauge is 2-D only")
    # coordinatewise clamps are nonexpansive in every supported (absolute,
    # monotone) norm, so the experiment norm always joins their certificate
    if isinstance(map_spec, CoordClampMap) and \
            norm.label() not in [n.label() for n in manifest.norms_1lip]:
        manifest = dataclasses.replace(
            manifest, norms_1lip=manifest.norms_1lip + (norm,))
    schedule = parse_schedule(raw["schedule"]) if "schedule" in raw else None

    anchor = np.asarray(raw.get("anchor", np.zeros(map_spec.dim)), dtype=float)
    if anchor.shape != (map_spec.dim,):
        raise ConfigError("anchor has the wrong dimension")
    if not map_spec.domain.contains(anchor):
        raise ConfigError("anchor lies outside the map domain")

    tol = float(raw.get("tol", 1e-9))
    fix_tol = float(raw.get("fix_tol", 1e-9))
    vi_tol = float(raw.get("vi_tol", 1e-8))
    if tol <= 0 or fix_tol <= 0 or vi_tol <= 0:
        raise ConfigError("tolerances must be positive")
    max_iter = raw.get("max_iter")
    if max_iter is not None:
        max_iter = int(max_iter)
        if max_iter < 1:
            raise ConfigError("max_iter must be at least 1")

    samples = raw.get("samples", {})
    if not isinstance(samples, dict):
        raise ConfigError("'samples' must be an object")

    out = raw.get("out", {})
    if not isinstance(out, dict):
        raise ConfigError("'out' must be an object")

    retract = raw.get("retract", {})
    if not isinstance(retract, dict):
        raise ConfigError("'retract' must be an object")
    counts = retract.get("grid")
    if counts is not None:
        counts = tuple(int(c) for c in counts)
        if len(counts) != map_spec.dim or any(c < 2 for c in counts):
            raise ConfigError("retract grid needs one count >= 2 per dimension")
    if "schedule" in retract:
        retract_schedule = parse_schedule(retract["schedule"])
    else:
        retract_schedule = GeometricSchedule(rho=0.5, k_max=24)

    return ExperimentConfig(
        map=map_spec,
        manifest=manifest,
        norm=norm,
        schedule=schedule,
        anchor=anchor,
        tol=tol,
        fix_tol=fix_tol,
        vi_tol=vi_tol,
        max_iter=max_iter,
        seed=int(raw.get("seed", 12345)) if seed is None else int(seed),
        n_pairs=int(samples.get("n_pairs", 10_000)),
        n_starts=int(samples.get("n_starts", 1000)),
        n_midpoints=int(samples.get("n_midpoints", 1000)),
        n_dirs=int(samples.get("n_dirs", 1000)),
        prefix=str(out.get("prefix", manifest.name)),
        svg=bool(out.get("svg", True)) if svg is None else bool(svg),
        out_dir=out.get("dir") if out_dir is None else out_dir,
        retract_counts=counts,
        retract_schedule=retract_schedule,
    )
