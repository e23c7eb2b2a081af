"""Pure-Python twin of the compiled iteration kernel.

Operates on plain float lists so a missing compiler costs only speed, not
functionality. Operation order matches `_core.pyx` exactly, so both backends
produce bit-identical iterates.
"""

import math

import numpy as np

from .ops import (OP_AFFINE, OP_CLAMP, OP_COMPOSE, OP_CONVEX, OP_GRAPH,
                  OP_PROJ_BALL, OP_PROJ_TRIANGLE, OP_SHEAR)

BACKEND_NAME = "pure"


def _eval(prog, pos, x, d):
    """Evaluate one program node at x, return (f(x), next position)."""
    op = int(prog[pos])
    if op == OP_AFFINE:
        n = int(prog[pos + 1])
        base = pos + 2
        out = [0.0] * n
        for i in range(n):
            acc = prog[base + n * n + i]  # offset term
            row = base + i * n
            for j in range(n):
                acc += prog[row + j] * x[j]
            out[i] = acc
        return out, base + n * n + n
    if op == OP_CLAMP:
        n = int(prog[pos + 1])
        base = pos + 2
        out = [0.0] * n
        for i in range(n):
            v = x[i]
            lo = prog[base + i]
            hi = prog[base + n + i]
            out[i] = lo if v < lo else (hi if v > hi else v)
        return out, base + 2 * n
    if op == OP_PROJ_BALL:
        n = int(prog[pos + 1])
        base = pos + 2
        r = prog[base + n]
        s = 0.0
        for i in range(n):
            diff = x[i] - prog[base + i]
            s += diff * diff
        dist = math.sqrt(s)
        if dist <= r:
            out = list(x)
        else:
            scale = r / dist
            out = [prog[base + i] + (x[i] - prog[base + i]) * scale
                   for i in range(n)]
        return out, base + n + 1
    if op == OP_PROJ_TRIANGLE:
        return _project_triangle(x[0], x[1]), pos + 1
    if op == OP_SHEAR:
        alpha = prog[pos + 1]
        eps0 = prog[pos + 2]
        u, v = x[0], x[1]
        return [u + _shear_eps(alpha, eps0, v),
                alpha * (v + 0.5) - 0.5], pos + 3
    if op == OP_GRAPH:
        c0 = prog[pos + 1]
        c1 = prog[pos + 2]
        return [x[0], c0 + c1 * abs(x[0])], pos + 3
    if op == OP_COMPOSE:
        k = int(prog[pos + 1])
        p = pos + 2
        cur = list(x)
        for _ in range(k):
            cur, p = _eval(prog, p, cur, d)
        return cur, p
    if op == OP_CONVEX:
        k = int(prog[pos + 1])
        base = pos + 2
        p = base + k
        acc = [0.0] * d
        for c in range(k):
            w = prog[base + c]
            child, p = _eval(prog, p, x, d)
            for i in range(d):
                acc[i] += w * child[i]
        return acc, p
    raise ValueError(f"unknown opcode {op} at position {pos}")


def _shear_eps(alpha, eps0, v):
    """Shear amplitude at height v: eps0 * t*sin(ln t) with t the gap g^-1(v)."""
    if v >= 0.0:
        return 0.0
    t = (alpha - 1.0) * (1.0 + 2.0 * v) / (alpha - 1.0 + 2.0 * alpha * v)
    if t <= 0.0:
        return 0.0
    if t > 1.0:
        t = 1.0
    return eps0 * t * math.sin(math.log(t))


def _project_triangle(px, py):
    """Euclidean projection onto {(x, y): -1/2 <= y <= 1/2 - |x|}."""
    if py >= -0.5 and py <= 0.5 - abs(px):
        return [px, py]
    bx, by = _project_segment(px, py, -1.0, -0.5, 1.0, -0.5)
    bd = (px - bx) ** 2 + (py - by) ** 2
    for ax, ay, cx, cy in ((-1.0, -0.5, 0.0, 0.5), (1.0, -0.5, 0.0, 0.5)):
        qx, qy = _project_segment(px, py, ax, ay, cx, cy)
        qd = (px - qx) ** 2 + (py - qy) ** 2
        if qd < bd:
            bx, by, bd = qx, qy, qd
    return [bx, by]


def _project_segment(px, py, ax, ay, bx, by):
    ux = bx - ax
    uy = by - ay
    t = ((px - ax) * ux + (py - ay) * uy) / (ux * ux + uy * uy)
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return ax + t * ux, ay + t * uy


def eval_point(prog, x, d):
    """Single map evaluation of an encoded program."""
    out, _ = _eval([float(v) for v in prog], 0, [float(v) for v in x], d)
    return np.asarray(out, dtype=float)


def run_contraction(prog, d, lam, anchor, y0, tol_step, max_iter):
    """Iterate y <- lam*f(y) + (1-lam)*anchor until the Euclidean step is small.

    Returns (final iterate, iterations performed, last step length). The
    caller decides convergence from last_step <= tol_step.
    """
    p = [float(v) for v in prog]
    a = [float(v) for v in anchor]
    y = [float(v) for v in y0]
    one_m = 1.0 - lam
    step = math.inf
    it = 0
    while it < max_iter:
        it += 1
        fy, _ = _eval(p, 0, y, d)
        step2 = 0.0
        for i in range(d):
            nv = lam * fy[i] + one_m * a[i]
            diff = nv - y[i]
            step2 += diff * diff
            y[i] = nv
        step = math.sqrt(step2)
        if step <= tol_step:
            break
    return np.asarray(y, dtype=float), it, step
