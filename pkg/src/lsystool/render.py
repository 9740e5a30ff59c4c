"""Turtle interpretation and binary rasterization of words.

Segments live in a y-up plane until rasterization; the raster flips y so
the turtle's initial "up" heading points toward the top of the image.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .backend import fill_mask, line_pixels
from .errors import DegenerateBoundingBox, LsysError, OutOfCanvas

DEFAULT_MARGIN = 6


def interpret(word, angle_deg, step_len):
    """Walk the turtle over ``word`` and collect the drawn segments.

    Heading is measured in degrees clockwise from +y; ``+`` rotates
    clockwise, ``-`` counter-clockwise.  Returns an (n, 4) float64 array
    of (x0, y0, x1, y1) rows, one per F in the char expansion.
    """
    if not 0.0 < angle_deg < 90.0:
        raise LsysError("branching angle must be in (0, 90) degrees")
    if not step_len > 0:
        raise LsysError("segment length must be positive")
    x, y, heading = 0.0, 0.0, 0.0
    stack = []
    rows = []
    for ch in word.text:
        if ch == "F":
            h = math.radians(heading)
            nx = x + step_len * math.sin(h)
            ny = y + step_len * math.cos(h)
            rows.append((x, y, nx, ny))
            x, y = nx, ny
        elif ch == "+":
            heading += angle_deg
        elif ch == "-":
            heading -= angle_deg
        elif ch == "[":
            stack.append((x, y, heading))
        else:
            x, y, heading = stack.pop()
    return np.array(rows, dtype=np.float64).reshape(-1, 4)


def fit_to_canvas(segments, width, height, margin=DEFAULT_MARGIN):
    """Isotropically scale + translate segments into the canvas interior.

    The bounding box inscribes the (width-2*margin) x (height-2*margin)
    box; the slack axis is centered.  Aspect ratio is preserved.
    """
    segments = np.asarray(segments, dtype=np.float64).reshape(-1, 4)
    if segments.size == 0:
        raise LsysError("cannot fit an empty segment list")
    xs = segments[:, [0, 2]]
    ys = segments[:, [1, 3]]
    min_x, max_x = xs.min(), xs.max()
    min_y, max_y = ys.min(), ys.max()
    bw, bh = max_x - min_x, max_y - min_y
    if bw == 0.0 and bh == 0.0:
        raise DegenerateBoundingBox("all endpoints coincide")
    iw = width - 2 * margin
    ih = height - 2 * margin
    if iw <= 0 or ih <= 0:
        raise LsysError("margin leaves no canvas interior")
    scale = min(iw / bw if bw > 0 else math.inf,
                ih / bh if bh > 0 else math.inf)
    off_x = margin + (iw - scale * bw) / 2.0 - scale * min_x
    off_y = margin + (ih - scale * bh) / 2.0 - scale * min_y
    out = np.empty_like(segments)
    out[:, [0, 2]] = segments[:, [0, 2]] * scale + off_x
    out[:, [1, 3]] = segments[:, [1, 3]] * scale + off_y
    return out


@dataclass(frozen=True)
class RasterImage:
    """Binary raster; ``pixels`` is a (height, width) uint8 mask, row 0 top."""

    width: int
    height: int
    pixels: np.ndarray

    def foreground_count(self):
        return int(self.pixels.sum())

    def to_pgm_bytes(self):
        """8-bit P5 PGM: foreground 0 (black) on background 255 (white)."""
        header = f"P5\n{self.width} {self.height}\n255\n".encode("ascii")
        body = np.where(self.pixels > 0, 0, 255).astype(np.uint8)
        return header + body.tobytes()

    def save_pgm(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_pgm_bytes())

    def save_png(self, path):
        from PIL import Image
        body = np.where(self.pixels > 0, 0, 255).astype(np.uint8)
        Image.fromarray(body, mode="L").save(path)


def _round_half_up(a):
    # np.round ties-to-even would make pixel placement depend on parity
    return np.floor(np.asarray(a) + 0.5).astype(np.int64)


def rasterize(segments, width, height):
    """Rasterize segments with 1-px Bresenham strokes, y flipped to image-up."""
    segments = np.asarray(segments, dtype=np.float64).reshape(-1, 4)
    if segments.size == 0:
        return RasterImage(width, height,
                           np.zeros((height, width), dtype=np.uint8))
    coords = _round_half_up(segments)
    xs = coords[:, [0, 2]]
    ys = coords[:, [1, 3]]
    if xs.min() < 0 or xs.max() >= width or ys.min() < 0 or ys.max() >= height:
        raise OutOfCanvas("segment endpoint outside canvas")
    flipped = np.empty_like(coords, dtype=np.int32)
    flipped[:, [0, 2]] = xs
    flipped[:, [1, 3]] = (height - 1) - ys
    return RasterImage(width, height, fill_mask(flipped, width, height))


def render_word(word, angle_deg, step_len, size, margin=DEFAULT_MARGIN):
    """interpret + fit + rasterize in one call; handles rotation-only words."""
    segs = interpret(word, angle_deg, step_len)
    if segs.shape[0] == 0:
        return RasterImage(size, size, np.zeros((size, size), dtype=np.uint8))
    return rasterize(fit_to_canvas(segs, size, size, margin), size, size)


def segment_pixels(x0, y0, x1, y1):
    """Pixel set of one rounded segment (no flip); thin wrapper over the kernel."""
    c = _round_half_up([x0, y0, x1, y1])
    pts = line_pixels(int(c[0]), int(c[1]), int(c[2]), int(c[3]))
    return pts
