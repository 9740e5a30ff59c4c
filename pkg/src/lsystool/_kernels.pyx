# cython: boundscheck=False, wraparound=False, language_level=3
"""Compiled line-stepping kernels; mirror of _kernels_py (keep in lockstep)."""

import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPLEMENTATION = "cython"


def line_pixels(int x0, int y0, int x1, int y1):
    cdef int tmp, dx, dy, sx, sy, err, e2, x, y, n
    if (x0, y0) > (x1, y1):
        tmp = x0; x0 = x1; x1 = tmp
        tmp = y0; y0 = y1; y1 = tmp
    dx = x1 - x0 if x1 >= x0 else x0 - x1
    dy = y1 - y0 if y1 >= y0 else y0 - y1
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx - dy
    out = np.empty((dx + dy + 1, 2), dtype=np.int32)
    cdef cnp.int32_t[:, ::1] o = out
    n = 0
    x = x0
    y = y0
    while True:
        o[n, 0] = x
        o[n, 1] = y
        n += 1
        if x == x1 and y == y1:
            break
        e2 = 2 * err
        if e2 > -dy:
            err -= dy
            x += sx
        if e2 < dx:
            err += dx
            y += sy
    return out[:n]


def fill_mask(coords, int width, int height):
    cdef cnp.int32_t[:, ::1] c = np.ascontiguousarray(
        np.asarray(coords, dtype=np.int32).reshape(-1, 4))
    mask = np.zeros((height, width), dtype=np.uint8)
    cdef cnp.uint8_t[:, ::1] m = mask
    cdef int i, x0, y0, x1, y1, tmp, dx, dy, sx, sy, err, e2, x, y
    for i in range(c.shape[0]):
        x0 = c[i, 0]; y0 = c[i, 1]; x1 = c[i, 2]; y1 = c[i, 3]
        if (x0, y0) > (x1, y1):
            tmp = x0; x0 = x1; x1 = tmp
            tmp = y0; y0 = y1; y1 = tmp
        dx = x1 - x0 if x1 >= x0 else x0 - x1
        dy = y1 - y0 if y1 >= y0 else y0 - y1
        sx = 1 if x0 < x1 else -1
        sy = 1 if y0 < y1 else -1
        err = dx - dy
        x = x0
        y = y0
        while True:
            m[y, x] = 1
            if x == x1 and y == y1:
                break
            e2 = 2 * err
            if e2 > -dy:
                err -= dy
                x += sx
            if e2 < dx:
                err += dx
                y += sy
    return mask
