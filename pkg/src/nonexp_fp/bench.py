"""Benchmark of the iteration-kernel backends.

Runs the oscillating-shear continuation (the iteration-heaviest built-in) on
the pure-Python kernel and, when available, the compiled one, and reports
wall time per backend. Usage::

    python -m nonexp_fp.bench [--s-max 9] [--step 0.25] [--tol 1e-9] [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

from . import _kernel, catalog
from .solver import LogSpacedSchedule, continuation


def _time_backend(map_spec, schedule, tol, backend, repeats):
    best = None
    iters = 0
    for _ in range(repeats):
        t0 = time.perf_counter()
        traj = continuation(map_spec, schedule, tol=tol, backend=backend)
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
        iters = sum(r.iterations for r in traj.reports)
    return best, iters


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--s-max", type=float, default=9.0)
    parser.add_argument("--step", type=float, default=0.25)
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)

    map_spec, _ = catalog.build_builtin("oscillating_shear")
    schedule = LogSpacedSchedule(s_min=0.5, s_max=args.s_max, step=args.step)
    print(f"map: {map_spec.label()}")
    print(f"schedule: s in [0.5, {args.s_max:g}] step {args.step:g} "
          f"({len(schedule.lambdas())} values), tol {args.tol:g}")
    print(f"default backend at import: {_kernel.BACKEND}")
    print()

    results = {}
    for backend in ("pure", "compiled"):
        if _kernel.get_backend(backend) is None:
            print(f"{backend:>9}: not available (extension not built)")
            continue
        best, iters = _time_backend(map_spec, schedule, args.tol, backend,
                                    args.repeats)
        results[backend] = best
        print(f"{backend:>9}: {best * 1e3:9.1f} ms   "
              f"({iters} iterations, {iters / best / 1e6:.1f} M iter/s)")
    if len(results) == 2:
        print(f"\nspeedup compiled vs pure: {results['pure'] / results['compiled']:.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
