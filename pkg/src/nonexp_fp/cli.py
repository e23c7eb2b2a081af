"""Command line front end for contraction-continuation experiments.

Subcommands:

* ``run <config.json>``     solve the schedule, write the trajectory CSV,
                            optional SVG plots, and trajectory-scoped checks.
* ``check <config.json>``   full diagnostics suite for the configured map and
                            norm; checks JSON is always written.
* ``retract <config.json>`` anchored continuation over a grid of anchors;
                            CSV of (anchor, retraction value) rows plus the
                            retraction checks.
* ``maps``                  list built-in maps and their manifests as JSON.

Exit codes: 0 when every check passes or reproduces its expected failure,
1 on solver nonconvergence or an unexpected check outcome, 2 on bad
configuration. An expected failure (the counterexample maps violating
Euclidean monotonicity or fixed-set convexity) counts as success; an
unexpected pass of such a check counts as failure.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import catalog, diagnostics
from .artifacts import (atomic_write_text, checks_json_text,
                        retraction_csv_text, svg_line_plot, svg_path_plot,
                        trajectory_csv_text)
from .config import ConfigError, build_config, load_json
from .geometry import norm_value_batch
from .maps import lipschitz_estimate
from .solver import NonconvergenceError, continuation, grid_anchors, retraction_grid

_OK_STATUSES = {"pass", "expected_fail", "skipped"}

# per-check seed offsets, so one config seed reproduces the whole suite
_SEED_MONOTONE = 1
_SEED_DUALITY = 2
_SEED_FIX = 3
_SEED_CONVEXITY = 4
_SEED_LIPSCHITZ = 5
_SEED_DUALITY_AUDIT = 6


def _entry(report, expect_pass=True, reason=None):
    if expect_pass:
        status = "pass" if report.passed else "fail"
    else:
        status = "unexpected_pass" if report.passed else "expected_fail"
    return {"name": report.name, "status": status, "reason": reason,
            "report": report.to_dict()}


def _skipped(name, reason):
    return {"name": name, "status": "skipped", "reason": reason, "report": None}


def _suite_ok(entries):
    return all(e["status"] in _OK_STATUSES for e in entries)


def _trajectory_entries(cfg, traj):
    entries = [_entry(diagnostics.residual_bounds(traj))]
    if cfg.norm.kind == "euclidean":
        entries.append(_entry(diagnostics.check_norm_monotone(traj, cfg.fix_tol)))
    else:
        entries.append(_skipped(
            "norm_growth",
            f"proved only for the Euclidean norm, experiment uses {cfg.norm.label()}"))
    div = diagnostics.detect_divergence(traj, tail_fraction=0.6)
    if cfg.manifest.diverges:
        floor = cfg.manifest.divergence_floor or 0.0
        passed = div.tail_diameter >= floor
        entry = {"name": "divergence_certified",
                 "status": "pass" if passed else "fail",
                 "reason": None,
                 "report": {"name": "divergence_certified", "passed": passed,
                            "worst_value": div.tail_diameter, "bound": floor,
                            "samples": div.tail_count,
                            "detail": div.to_dict()}}
    else:
        bound = 4.0 * cfg.tol
        passed = div.tail_diameter <= bound
        entry = {"name": "tail_collapse",
                 "status": "pass" if passed else "fail",
                 "reason": None,
                 "report": {"name": "tail_collapse", "passed": passed,
                            "worst_value": div.tail_diameter, "bound": bound,
                            "samples": div.tail_count,
                            "detail": div.to_dict()}}
    entries.append(entry)
    return entries


def _solve_trajectory(cfg):
    if cfg.schedule is None:
        raise ConfigError("config needs a 'schedule' for this command")
    return continuation(cfg.map, cfg.schedule, tol=cfg.tol,
                        max_iter=cfg.max_iter, anchor=cfg.anchor,
                        norm=cfg.norm, map_id=cfg.manifest.name)


def _write_svgs(cfg, traj, out_dir):
    lams = traj.lambdas()
    ys = traj.ys()
    paths = []
    coord_series = [(f"y_{i + 1}", ys[:, i]) for i in range(ys.shape[1])]
    p = os.path.join(out_dir, f"{cfg.prefix}_lambda_coords.svg")
    atomic_write_text(p, svg_line_plot(lams, coord_series,
                                       f"{cfg.manifest.name}: coordinates of y",
                                       "lambda", "coordinate"))
    paths.append(p)
    norms = norm_value_batch(cfg.norm, ys)
    p = os.path.join(out_dir, f"{cfg.prefix}_lambda_norm.svg")
    atomic_write_text(p, svg_line_plot(lams, [("|y|", norms)],
                                       f"{cfg.manifest.name}: norm of y",
                                       "lambda", f"|y| ({cfg.norm.label()})"))
    paths.append(p)
    if ys.shape[1] == 2:
        p = os.path.join(out_dir, f"{cfg.prefix}_path.svg")
        atomic_write_text(p, svg_path_plot(ys, f"{cfg.manifest.name}: planar path"))
        paths.append(p)
    return paths


def _cmd_run(cfg, out_dir):
    csv_path = os.path.join(out_dir, f"{cfg.prefix}_trajectory.csv")
    checks_path = os.path.join(out_dir, f"{cfg.prefix}_checks.json")
    try:
        traj = _solve_trajectory(cfg)
    except NonconvergenceError as err:
        if err.partial is not None and err.partial.reports:
            atomic_write_text(csv_path, trajectory_csv_text(err.partial))
            print(f"wrote {csv_path} (partial)")
        entries = [{"name": "solve", "status": "fail",
                    "reason": str(err), "report": None}]
        atomic_write_text(checks_path, checks_json_text(entries))
        print(f"wrote {checks_path}")
        print(f"error: {err}", file=sys.stderr)
        return 1
    atomic_write_text(csv_path, trajectory_csv_text(traj))
    print(f"wrote {csv_path}")
    for p in _write_svgs(cfg, traj, out_dir) if cfg.svg else []:
        print(f"wrote {p}")
    entries = _trajectory_entries(cfg, traj)
    atomic_write_text(checks_path, checks_json_text(entries))
    print(f"wrote {checks_path}")
    return 0 if _suite_ok(entries) else 1


def _cmd_check(cfg, out_dir):
    man = cfg.manifest
    checks_path = os.path.join(out_dir, f"{cfg.prefix}_checks.json")
    entries = []

    for norm in man.norms_1lip:
        est = lipschitz_estimate(cfg.map, norm, n_pairs=cfg.n_pairs,
                                 seed=cfg.seed + _SEED_LIPSCHITZ)
        rep = diagnostics.CheckReport(
            name=f"lipschitz[{norm.label()}]", passed=bool(est <= 1.0 + 1e-9),
            worst_value=est, bound=1.0 + 1e-9, samples=cfg.n_pairs,
            seed=cfg.seed + _SEED_LIPSCHITZ)
        entries.append(_entry(rep))

    entries.append(_entry(diagnostics.check_duality_audit(
        cfg.norm, cfg.map.dim, n_dirs=cfg.n_dirs,
        seed=cfg.seed + _SEED_DUALITY_AUDIT)))

    rep = diagnostics.check_monotone(cfg.map, n_pairs=cfg.n_pairs,
                                     seed=cfg.seed + _SEED_MONOTONE)
    entries.append(_entry(rep, expect_pass=man.euclidean_nonexpansive,
                          reason=None if man.euclidean_nonexpansive else
                          "map is not Euclidean-nonexpansive; the bracket "
                          "must go negative"))

    lip_labels = [n.label() for n in man.norms_1lip]
    if not cfg.norm.smooth:
        entries.append(_skipped(f"monotone_duality[{cfg.norm.label()}]",
                                "experiment norm is not smooth"))
    elif cfg.norm.label() not in lip_labels:
        entries.append(_skipped(f"monotone_duality[{cfg.norm.label()}]",
                                "map not certified 1-Lipschitz under the "
                                "experiment norm"))
    else:
        entries.append(_entry(diagnostics.check_duality_monotone(
            cfg.map, cfg.norm, n_pairs=cfg.n_pairs,
            seed=cfg.seed + _SEED_DUALITY)))

    try:
        traj = _solve_trajectory(cfg)
    except NonconvergenceError as err:
        entries.append({"name": "solve", "status": "fail",
                        "reason": str(err), "report": None})
        atomic_write_text(checks_path, checks_json_text(entries))
        print(f"wrote {checks_path}")
        return 1
    entries.extend(_trajectory_entries(cfg, traj))

    fix = diagnostics.sample_fixed_points(cfg.map, n_starts=cfg.n_starts,
                                          seed=cfg.seed + _SEED_FIX,
                                          fix_tol=cfg.fix_tol)
    terminal = traj.reports[-1].y
    if man.diverges:
        entries.append(_skipped(f"variational_limit[{cfg.norm.label()}]",
                                "path has no limit to characterize"))
        entries.append(_skipped(f"uniqueness[{cfg.norm.label()}]",
                                "path has no limit to characterize"))
    elif not cfg.norm.smooth:
        entries.append(_skipped("variational_limit",
                                "experiment norm is not smooth"))
        entries.append(_skipped("uniqueness",
                                "experiment norm is not smooth"))
    else:
        refined = diagnostics.refine_fixed_point(cfg.map, terminal,
                                                 fix_tol=cfg.fix_tol)
        fix = diagnostics.extend_sample(fix, refined, cfg.map)
        entries.append(_entry(diagnostics.check_variational_limit(
            terminal, fix, cfg.norm, anchor=cfg.anchor, tol=cfg.vi_tol)))
        entries.append(_entry(diagnostics.uniqueness_probe(
            fix, cfg.norm, anchor=cfg.anchor, tol=cfg.vi_tol)))

    conv = diagnostics.convexity_probe(fix, cfg.map,
                                       n_midpoints=cfg.n_midpoints,
                                       seed=cfg.seed + _SEED_CONVEXITY,
                                       fix_tol=cfg.fix_tol)
    entries.append(_entry(conv, expect_pass=man.fix_convex,
                          reason=None if man.fix_convex else
                          "fixed set is not convex; a midpoint violation "
                          "must be found"))

    atomic_write_text(checks_path, checks_json_text(entries))
    for e in entries:
        print(f"{e['name']}: {e['status']}")
    ok = _suite_ok(entries)
    print(f"suite: {'PASS' if ok else 'FAIL'}")
    print(f"wrote {checks_path}")
    return 0 if ok else 1


def _cmd_retract(cfg, out_dir):
    if cfg.retract_counts is None:
        raise ConfigError("config needs retract.grid for the retract command")
    csv_path = os.path.join(out_dir, f"{cfg.prefix}_retraction.csv")
    checks_path = os.path.join(out_dir, f"{cfg.prefix}_retract_checks.json")
    anchors = grid_anchors(cfg.map.domain, cfg.retract_counts)
    try:
        pairs = retraction_grid(cfg.map, anchors, cfg.retract_schedule,
                                tol=cfg.tol)
    except NonconvergenceError as err:
        atomic_write_text(checks_path, checks_json_text(
            [{"name": "solve", "status": "fail", "reason": str(err),
              "report": None}]))
        print(f"error: {err}", file=sys.stderr)
        return 1
    atomic_write_text(csv_path, retraction_csv_text(pairs, cfg.map.dim))
    print(f"wrote {csv_path}")

    A = np.array([a for a, _ in pairs])
    Y = np.array([y for _, y in pairs])
    entries = [
        _entry(_retraction_lipschitz(A, Y, cfg)),
        _entry(_retraction_identity(A, Y, cfg)),
    ]
    atomic_write_text(checks_path, checks_json_text(entries))
    print(f"wrote {checks_path}")
    return 0 if _suite_ok(entries) else 1


def _retraction_lipschitz(A, Y, cfg, slack=1e-6):
    """Pairwise ||y_a - y_a'|| <= (1 + slack) * ||a - a'|| in the experiment
    norm; the retraction must not expand."""
    n = A.shape[0]
    iu, ju = np.triu_indices(n, k=1)
    da = norm_value_batch(cfg.norm, A[iu] - A[ju])
    dy = norm_value_batch(cfg.norm, Y[iu] - Y[ju])
    ratios = dy / da
    k = int(np.argmax(ratios))
    worst = float(ratios[k])
    return diagnostics.CheckReport(
        name=f"retraction_lipschitz[{cfg.norm.label()}]",
        passed=bool(worst <= 1.0 + slack), worst_value=worst,
        bound=1.0 + slack, samples=int(iu.shape[0]),
        worst_witness=(A[iu[k]], A[ju[k]]))


def _retraction_identity(A, Y, cfg, tol=1e-6):
    """Anchors that are already fixed points must retract to themselves."""
    res = np.linalg.norm(cfg.map.eval_batch(A) - A, axis=1)
    fixed = res <= cfg.fix_tol
    if not np.any(fixed):
        return diagnostics.CheckReport(
            name="retraction_identity", passed=True, worst_value=0.0,
            bound=tol, samples=0, note="no grid anchor lies in Fix(f)")
    moved = np.linalg.norm(Y[fixed] - A[fixed], axis=1)
    k = int(np.argmax(moved))
    return diagnostics.CheckReport(
        name="retraction_identity", passed=bool(moved[k] <= tol),
        worst_value=float(moved[k]), bound=tol, samples=int(fixed.sum()),
        worst_witness=(A[np.flatnonzero(fixed)[k]],))


def _cmd_maps():
    import json
    print(json.dumps([m.to_dict() for m in catalog.manifests()],
                     indent=2, sort_keys=True))
    return 0


def _resolve_out_dir(cfg_dir, flag_dir):
    if flag_dir:
        return flag_dir
    if cfg_dir:
        return cfg_dir
    return os.environ.get("NONEXP_FP_OUT_DIR", ".")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nonexp-fp",
        description="fixed points of nonexpansive maps by contraction "
                    "continuation")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("run", "check", "retract"):
        p = sub.add_parser(name)
        p.add_argument("config", help="path to the JSON experiment config")
        p.add_argument("--out-dir", default=None,
                       help="output directory (default: config, then "
                            "$NONEXP_FP_OUT_DIR, then .)")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--svg", action=argparse.BooleanOptionalAction,
                       default=None, help="emit SVG plots (run only)")
    sub.add_parser("maps")
    args = parser.parse_args(argv)

    if args.command == "maps":
        return _cmd_maps()

    try:
        raw = load_json(args.config)
        cfg = build_config(raw, seed=args.seed, svg=args.svg)
        out_dir = _resolve_out_dir(cfg.out_dir, args.out_dir)
        os.makedirs(out_dir, exist_ok=True)
        if args.command == "run":
            return _cmd_run(cfg, out_dir)
        if args.command == "check":
            return _cmd_check(cfg, out_dir)
        return _cmd_retract(cfg, out_dir)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
