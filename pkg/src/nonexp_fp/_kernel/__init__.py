"""Iteration kernel with a compiled core and a pure-Python fallback.

The compiled backend is used when the extension built successfully and the
environment variable NONEXP_FP_PURE is unset; both expose the same
`run_contraction` / `eval_point` surface and produce bit-identical iterates.
"""

import os

from .ops import MAX_DEPTH, MAX_DIM  # noqa: F401  (re-exported limits)

if os.environ.get("NONEXP_FP_PURE"):
    from . import _pure as _impl
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

BACKEND = _impl.BACKEND_NAME
run_contraction = _impl.run_contraction
eval_point = _impl.eval_point


def get_backend(name):
    """Return a specific backend module ("pure" or "compiled"), or None."""
    if name == "pure":
        from . import _pure
        return _pure
    if name == "compiled":
        try:
            from . import _core
            return _core
        except ImportError:
            return None
    raise ValueError(f"unknown backend {name!r}")
