"""Deterministic experiment artifacts: CSV, JSON, and dependency-free SVG.

Floats are serialized with 17 significant digits so every value re-parses to
the exact in-memory double. Files are written atomically (temp file in the
target directory, then rename). Identical inputs produce byte-identical
files; nothing here embeds timestamps or environment state.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .geometry import norm_value

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def format_float(x) -> str:
    return "%.17g" % float(x)


def atomic_write_text(path, text):
    path = os.fspath(path)
    d = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix="~")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def trajectory_csv_text(traj) -> str:
    dim = traj.map.dim
    header = (["lambda", "iters", "residual", "norm_y"]
              + [f"y_{i + 1}" for i in range(dim)]
              + [f"x_{i + 1}" for i in range(dim)])
    lines = [",".join(header)]
    for rep in traj.reports:
        row = [format_float(rep.lam), str(rep.iterations),
               format_float(rep.residual),
               format_float(norm_value(traj.norm, rep.y))]
        row += [format_float(v) for v in rep.y]
        row += [format_float(v) for v in rep.x]
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def retraction_csv_text(pairs, dim) -> str:
    header = ([f"a_{i + 1}" for i in range(dim)]
              + [f"y_{i + 1}" for i in range(dim)])
    lines = [",".join(header)]
    for a, y in pairs:
        lines.append(",".join([format_float(v) for v in a]
                              + [format_float(v) for v in y]))
    return "\n".join(lines) + "\n"


def checks_json_text(entries) -> str:
    return json.dumps(entries, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# minimal SVG plotting
# ---------------------------------------------------------------------------

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 56, 16, 34, 40


def _scale(vals, lo, hi, out_lo, out_hi):
    span = hi - lo
    if span <= 0.0:
        span = 1.0
        lo = lo - 0.5
    return out_lo + (np.asarray(vals) - lo) * (out_hi - out_lo) / span


def _fmt(x):
    return "%.6g" % float(x)


def svg_line_plot(xs, series, title, xlabel, ylabel) -> str:
    """Polyline chart; ``series`` is a list of (label, ys) pairs."""
    xs = np.asarray(xs, dtype=float)
    all_y = np.concatenate([np.asarray(ys, dtype=float) for _, ys in series])
    x_lo, x_hi = float(np.min(xs)), float(np.max(xs))
    y_lo, y_hi = float(np.min(all_y)), float(np.max(all_y))
    px = _scale(xs, x_lo, x_hi, _ML, _W - _MR)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
        f'<line x1="{_ML}" y1="{_H - _MB}" x2="{_W - _MR}" y2="{_H - _MB}" '
        'stroke="black"/>',
        f'<line x1="{_ML}" y1="{_MT}" x2="{_ML}" y2="{_H - _MB}" stroke="black"/>',
    ]
    for i, (label, ys) in enumerate(series):
        py = _scale(ys, y_lo, y_hi, _H - _MB, _MT)
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
        color = _PALETTE[i % len(_PALETTE)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     'stroke-width="1.5"/>')
        parts.append(f'<text x="{_W - _MR - 4}" y="{_MT + 14 + 16 * i}" '
                     f'text-anchor="end" font-family="monospace" font-size="12" '
                     f'fill="{color}">{label}</text>')
    parts += [
        f'<text x="{_ML - 6}" y="{_H - _MB + 4}" text-anchor="end" '
        f'font-family="monospace" font-size="11">{_fmt(y_lo)}</text>',
        f'<text x="{_ML - 6}" y="{_MT + 10}" text-anchor="end" '
        f'font-family="monospace" font-size="11">{_fmt(y_hi)}</text>',
        f'<text x="{_ML}" y="{_H - _MB + 16}" text-anchor="middle" '
        f'font-family="monospace" font-size="11">{_fmt(x_lo)}</text>',
        f'<text x="{_W - _MR}" y="{_H - _MB + 16}" text-anchor="middle" '
        f'font-family="monospace" font-size="11">{_fmt(x_hi)}</text>',
        f'<text x="{(_ML + _W - _MR) // 2}" y="{_H - 8}" text-anchor="middle" '
        f'font-family="monospace" font-size="12">{xlabel}</text>',
        f'<text x="14" y="{(_MT + _H - _MB) // 2}" text-anchor="middle" '
        f'font-family="monospace" font-size="12" '
        f'transform="rotate(-90 14 {(_MT + _H - _MB) // 2})">{ylabel}</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def svg_path_plot(points, title) -> str:
    """Planar path of a 2-D trajectory, equal axis scaling."""
    P = np.asarray(points, dtype=float)
    lo = P.min(axis=0)
    hi = P.max(axis=0)
    center = 0.5 * (lo + hi)
    half = float(np.max(hi - lo)) / 2.0 or 0.5
    side = min(_W - _ML - _MR, _H - _MT - _MB)
    px = _scale(P[:, 0], center[0] - half, center[0] + half, _ML, _ML + side)
    py = _scale(P[:, 1], center[1] - half, center[1] + half, _MT + side, _MT)
    pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<text x="{_W // 2}" y="20" text-anchor="middle" '
        f'font-family="monospace" font-size="14">{title}</text>',
        f'<rect x="{_ML}" y="{_MT}" width="{side}" height="{side}" '
        'fill="none" stroke="black"/>',
        f'<polyline points="{pts}" fill="none" stroke="{_PALETTE[0]}" '
        'stroke-width="1.5"/>',
        f'<circle cx="{_fmt(px[-1])}" cy="{_fmt(py[-1])}" r="3" '
        f'fill="{_PALETTE[1]}"/>',
        f'<text x="{_ML}" y="{_MT + side + 16}" font-family="monospace" '
        f'font-size="11">[{_fmt(center[0] - half)}, {_fmt(center[0] + half)}]'
        f' x [{_fmt(center[1] - half)}, {_fmt(center[1] + half)}]</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"
