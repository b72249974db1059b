"""Hot geometry kernels.

Every function here is written in a loop-heavy style that numba can compile
in nopython mode; `backend.maybe_njit` turns them into JIT kernels unless the
pure-numpy fallback is selected via HANDROI_NO_NUMBA=1.

Polygon convention: (n, 2) float64 arrays, vertices ordered so the signed
shoelace sum is non-negative (counter-clockwise in the y-down image frame).
"""

import math

import numpy as np

from .backend import maybe_njit


@maybe_njit
def poly_area(pts):
    """Absolute shoelace area of a simple polygon; 0 for fewer than 3 vertices."""
    n = pts.shape[0]
    if n < 3:
        return 0.0
    s = 0.0
    for i in range(n):
        j = (i + 1) % n
        s += pts[i, 0] * pts[j, 1] - pts[j, 0] * pts[i, 1]
    return abs(s) * 0.5


@maybe_njit
def quad_corners(cx, cy, size, rot_deg, width, height):
    """Pixel corners of an oriented square ROI given in normalized coords.

    Corner offsets are laid out in height units, rotated, aspect-corrected
    back to normalized x, then scaled to pixels. Output order keeps the
    shoelace sum non-negative.
    """
    th = rot_deg * (math.pi / 180.0)
    c = math.cos(th)
    s = math.sin(th)
    h = size * 0.5
    rho = width / height
    out = np.empty((4, 2))
    ox = (-h, h, h, -h)
    oy = (-h, -h, h, h)
    for i in range(4):
        rx = ox[i] * c - oy[i] * s
        ry = ox[i] * s + oy[i] * c
        out[i, 0] = (cx + rx / rho) * width
        out[i, 1] = (cy + ry) * height
    return out


@maybe_njit
def clip_convex(subject, clip):
    """Sutherland-Hodgman intersection of two convex polygons.

    Both inputs must follow the non-negative shoelace orientation. Returns
    the intersection polygon in the same orientation; may be empty.
    """
    n_out = subject.shape[0]
    out = np.empty((16, 2))
    buf = np.empty((16, 2))
    for i in range(n_out):
        out[i, 0] = subject[i, 0]
        out[i, 1] = subject[i, 1]
    m = clip.shape[0]
    for ci in range(m):
        ax = clip[ci, 0]
        ay = clip[ci, 1]
        cj = (ci + 1) % m
        bx = clip[cj, 0]
        by = clip[cj, 1]
        ex = bx - ax
        ey = by - ay
        n_in = n_out
        n_out = 0
        if n_in == 0:
            break
        for i in range(n_in):
            buf[i, 0] = out[i, 0]
            buf[i, 1] = out[i, 1]
        px = buf[n_in - 1, 0]
        py = buf[n_in - 1, 1]
        d_prev = ex * (py - ay) - ey * (px - ax)
        for i in range(n_in):
            qx = buf[i, 0]
            qy = buf[i, 1]
            d_cur = ex * (qy - ay) - ey * (qx - ax)
            if d_cur >= 0.0:
                if d_prev < 0.0:
                    t = d_prev / (d_prev - d_cur)
                    out[n_out, 0] = px + t * (qx - px)
                    out[n_out, 1] = py + t * (qy - py)
                    n_out += 1
                out[n_out, 0] = qx
                out[n_out, 1] = qy
                n_out += 1
            elif d_prev >= 0.0:
                t = d_prev / (d_prev - d_cur)
                out[n_out, 0] = px + t * (qx - px)
                out[n_out, 1] = py + t * (qy - py)
                n_out += 1
            px = qx
            py = qy
            d_prev = d_cur
    return out[:n_out].copy()


@maybe_njit
def quad_iou(qa, qb):
    """IoU of two convex quads; 0 when either has zero area."""
    area_a = poly_area(qa)
    area_b = poly_area(qb)
    if area_a == 0.0 or area_b == 0.0:
        return 0.0
    inter = poly_area(clip_convex(qa, qb))
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return inter / union
