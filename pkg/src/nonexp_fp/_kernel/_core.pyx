# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled iteration kernel.

Mirrors `_pure.py` operation for operation (same IEEE double sequence), so
the two backends produce bit-identical iterates. Dimensions are capped at 16,
matching the lowering limit.
"""

from libc.math cimport INFINITY, fabs, log, sin, sqrt

import numpy as np

BACKEND_NAME = "compiled"

cdef enum:
    OP_AFFINE = 1
    OP_CLAMP = 2
    OP_PROJ_BALL = 3
    OP_PROJ_TRIANGLE = 4
    OP_SHEAR = 5
    OP_GRAPH = 6
    OP_COMPOSE = 7
    OP_CONVEX = 8


cdef double _shear_eps(double alpha, double eps0, double v) noexcept nogil:
    cdef double t
    if v >= 0.0:
        return 0.0
    t = (alpha - 1.0) * (1.0 + 2.0 * v) / (alpha - 1.0 + 2.0 * alpha * v)
    if t <= 0.0:
        return 0.0
    if t > 1.0:
        t = 1.0
    return eps0 * t * sin(log(t))


cdef void _project_segment(double px, double py, double ax, double ay,
                           double bx, double by, double* qx, double* qy) noexcept nogil:
    cdef double ux = bx - ax
    cdef double uy = by - ay
    cdef double t = ((px - ax) * ux + (py - ay) * uy) / (ux * ux + uy * uy)
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    qx[0] = ax + t * ux
    qy[0] = ay + t * uy


cdef void _project_triangle(double px, double py, double* ox, double* oy) noexcept nogil:
    cdef double bx, by, bd, qx, qy, qd
    if py >= -0.5 and py <= 0.5 - fabs(px):
        ox[0] = px
        oy[0] = py
        return
    _project_segment(px, py, -1.0, -0.5, 1.0, -0.5, &bx, &by)
    bd = (px - bx) ** 2 + (py - by) ** 2
    _project_segment(px, py, -1.0, -0.5, 0.0, 0.5, &qx, &qy)
    qd = (px - qx) ** 2 + (py - qy) ** 2
    if qd < bd:
        bx = qx
        by = qy
        bd = qd
    _project_segment(px, py, 1.0, -0.5, 0.0, 0.5, &qx, &qy)
    qd = (px - qx) ** 2 + (py - qy) ** 2
    if qd < bd:
        bx = qx
        by = qy
    ox[0] = bx
    oy[0] = by


cdef Py_ssize_t _eval(const double* prog, Py_ssize_t pos, const double* x,
                      double* out, int d) noexcept nogil:
    """Evaluate one node at x into out; return next position, -1 on error."""
    cdef int op = <int>prog[pos]
    cdef int n, i, j, c, k
    cdef Py_ssize_t base, p
    cdef double acc, v, lo, hi, r, s, diff, dist, scale, w
    cdef double cur[16]
    cdef double nxt[16]
    if op == OP_AFFINE:
        n = <int>prog[pos + 1]
        base = pos + 2
        for i in range(n):
            acc = prog[base + n * n + i]
            for j in range(n):
                acc += prog[base + i * n + j] * x[j]
            out[i] = acc
        return base + n * n + n
    if op == OP_CLAMP:
        n = <int>prog[pos + 1]
        base = pos + 2
        for i in range(n):
            v = x[i]
            lo = prog[base + i]
            hi = prog[base + n + i]
            out[i] = lo if v < lo else (hi if v > hi else v)
        return base + 2 * n
    if op == OP_PROJ_BALL:
        n = <int>prog[pos + 1]
        base = pos + 2
        r = prog[base + n]
        s = 0.0
        for i in range(n):
            diff = x[i] - prog[base + i]
            s += diff * diff
        dist = sqrt(s)
        if dist <= r:
            for i in range(n):
                out[i] = x[i]
        else:
            scale = r / dist
            for i in range(n):
                out[i] = prog[base + i] + (x[i] - prog[base + i]) * scale
        return base + n + 1
    if op == OP_PROJ_TRIANGLE:
        _project_triangle(x[0], x[1], &out[0], &out[1])
        return pos + 1
    if op == OP_SHEAR:
        out[0] = x[0] + _shear_eps(prog[pos + 1], prog[pos + 2], x[1])
        out[1] = prog[pos + 1] * (x[1] + 0.5) - 0.5
        return pos + 3
    if op == OP_GRAPH:
        out[0] = x[0]
        out[1] = prog[pos + 1] + prog[pos + 2] * fabs(x[0])
        return pos + 3
    if op == OP_COMPOSE:
        k = <int>prog[pos + 1]
        p = pos + 2
        for i in range(d):
            cur[i] = x[i]
        for c in range(k):
            p = _eval(prog, p, cur, nxt, d)
            if p < 0:
                return -1
            for i in range(d):
                cur[i] = nxt[i]
        for i in range(d):
            out[i] = cur[i]
        return p
    if op == OP_CONVEX:
        k = <int>prog[pos + 1]
        base = pos + 2
        p = base + k
        for i in range(d):
            cur[i] = 0.0
        for c in range(k):
            w = prog[base + c]
            p = _eval(prog, p, x, nxt, d)
            if p < 0:
                return -1
            for i in range(d):
                cur[i] += w * nxt[i]
        for i in range(d):
            out[i] = cur[i]
        return p
    return -1


def eval_point(double[::1] prog, double[::1] x, int d):
    """Single map evaluation of an encoded program."""
    cdef double xin[16]
    cdef double out[16]
    cdef int i
    if d > 16 or d < 1 or x.shape[0] < d:
        raise ValueError("dimension out of kernel range")
    for i in range(d):
        xin[i] = x[i]
    if _eval(&prog[0], 0, xin, out, d) < 0:
        raise ValueError("invalid kernel program")
    res = np.empty(d, dtype=float)
    for i in range(d):
        res[i] = out[i]
    return res


def run_contraction(double[::1] prog, int d, double lam, double[::1] anchor,
                    double[::1] y0, double tol_step, long long max_iter):
    """Iterate y <- lam*f(y) + (1-lam)*anchor until the Euclidean step is small.

    Returns (final iterate, iterations performed, last step length).
    """
    cdef double y[16]
    cdef double fy[16]
    cdef double a[16]
    cdef double one_m = 1.0 - lam
    cdef double step = INFINITY
    cdef double step2, nv, diff
    cdef long long it = 0
    cdef Py_ssize_t rc = 0
    cdef int i
    if d > 16 or d < 1:
        raise ValueError("dimension out of kernel range")
    for i in range(d):
        y[i] = y0[i]
        a[i] = anchor[i]
    with nogil:
        while it < max_iter:
            it += 1
            rc = _eval(&prog[0], 0, y, fy, d)
            if rc < 0:
                break
            step2 = 0.0
            for i in range(d):
                nv = lam * fy[i] + one_m * a[i]
                diff = nv - y[i]
                step2 += diff * diff
                y[i] = nv
            step = sqrt(step2)
            if step <= tol_step:
                break
    if rc < 0:
        raise ValueError("invalid kernel program")
    res = np.empty(d, dtype=float)
    for i in range(d):
        res[i] = y[i]
    return res, int(it), float(step)
