"""Opcodes of the flat map-program encoding shared by both kernel backends.

A program is a flat float64 array, one node after another in depth-first
order:

    AFFINE        [1, d, A[0,0]..A[d-1,d-1] row major, b[0]..b[d-1]]
    CLAMP         [2, d, lo[0]..lo[d-1], hi[0]..hi[d-1]]
    PROJ_BALL     [3, d, c[0]..c[d-1], r]
    PROJ_TRIANGLE [4]                         (fixed 2-D triangle, see domains)
    SHEAR         [5, alpha, eps0]            (2-D oscillating shear map)
    GRAPH         [6, c0, c1]                 (2-D, profile g(u) = c0 + c1*|u|)
    COMPOSE       [7, k, <child 1> ... <child k>]   (applied left to right)
    CONVEX        [8, k, w_1..w_k, <child 1> ... <child k>]

Dimensions are capped at MAX_DIM and nesting depth at MAX_DEPTH; maps that do
not fit are run through the generic Python driver instead.
"""

OP_AFFINE = 1
OP_CLAMP = 2
OP_PROJ_BALL = 3
OP_PROJ_TRIANGLE = 4
OP_SHEAR = 5
OP_GRAPH = 6
OP_COMPOSE = 7
OP_CONVEX = 8

MAX_DIM = 16
MAX_DEPTH = 24
