"""Pure-Python line-stepping kernels.

The compiled module ``lsystool._kernels`` implements the same two functions
with identical integer arithmetic, so both backends produce bit-identical
masks.  Keep the algorithms in lockstep when editing either file.
"""

import numpy as np

IMPLEMENTATION = "python"


def line_pixels(x0, y0, x1, y1):
    """Inclusive Bresenham walk between two integer points.

    The endpoints are direction-normalized first, so a segment and its
    reverse produce the same pixel list.  Returns an (n, 2) int32 array
    of (x, y) pairs.
    """
    if (x0, y0) > (x1, y1):
        x0, y0, x1, y1 = x1, y1, x0, y0
    dx = abs(x1 - x0)
    dy = abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx - dy
    out = np.empty((dx + dy + 1, 2), dtype=np.int32)
    n = 0
    x, y = x0, y0
    while True:
        out[n, 0] = x
        out[n, 1] = y
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


def fill_mask(coords, width, height):
    """Draw every segment of an (n, 4) int32 (x0, y0, x1, y1) array.

    Returns a (height, width) uint8 mask with 1 on drawn pixels.  Pixels
    outside the canvas are an error upstream; no clipping happens here.
    """
    mask = np.zeros((height, width), dtype=np.uint8)
    for x0, y0, x1, y1 in np.asarray(coords, dtype=np.int32).reshape(-1, 4):
        pts = line_pixels(int(x0), int(y0), int(x1), int(y1))
        mask[pts[:, 1], pts[:, 0]] = 1
    return mask
