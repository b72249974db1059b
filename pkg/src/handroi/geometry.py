"""2-D geometry for oriented square ROIs.

Image convention: x right, y down, normalized coordinates in [0, 1].
Rotations are in degrees; a positive rotation appears clockwise on screen
because the y axis points down. ROI sizes are stored as fractions of the
image height; the aspect ratio rho = width / height corrects x distances so
an ROI is square in pixels.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateGeometry, InvalidAspect, InvalidImage


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DegenerateGeometry(f"non-finite Vec2 ({self.x}, {self.y})")


@dataclass(frozen=True)
class Vec3:
    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise DegenerateGeometry(f"non-finite Vec3 ({self.x}, {self.y}, {self.z})")

    def xy(self) -> Vec2:
        return Vec2(self.x, self.y)


@dataclass(frozen=True)
class RotRect:
    """Oriented square ROI: normalized center, side in height units, degrees in [0, 360)."""

    center: Vec2
    size: float
    rotation: float

    def __post_init__(self):
        if not math.isfinite(self.size) or self.size < 0:
            raise DegenerateGeometry(f"invalid size {self.size}")
        if not math.isfinite(self.rotation) or not (0.0 <= self.rotation < 360.0):
            raise DegenerateGeometry(f"rotation {self.rotation} not normalized to [0, 360)")


def normalize_deg(angle: float) -> float:
    """Map any finite angle to [0, 360)."""
    a = math.fmod(angle, 360.0)
    if a < 0:
        a += 360.0
    if a >= 360.0:  # fmod artifacts near 360
        a = 0.0
    return a


def angle_deg(a: Vec2, b: Vec2) -> float:
    """Direction of a->b in degrees, in (-180, 180], y-down atan2 convention."""
    dx = b.x - a.x
    dy = b.y - a.y
    if dx == 0.0 and dy == 0.0:
        raise DegenerateGeometry("angle of coincident points is undefined")
    return math.degrees(math.atan2(dy, dx))


def rotate_vec(v: Vec2, theta_deg: float) -> Vec2:
    th = math.radians(theta_deg)
    c, s = math.cos(th), math.sin(th)
    return Vec2(v.x * c - v.y * s, v.x * s + v.y * c)


def aspect_distance(a: Vec2, b: Vec2, rho: float) -> float:
    """Distance in height units between normalized points, x corrected by rho."""
    if not (rho > 0) or not math.isfinite(rho):
        raise InvalidAspect(f"aspect ratio must be > 0, got {rho}")
    dx = (a.x - b.x) * rho
    dy = a.y - b.y
    return math.hypot(dx, dy)


def circular_diff_deg(a: float, b: float) -> float:
    """Absolute angular difference wrapped on the 360 circle, in [0, 180]."""
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def rect_to_quad(r: RotRect, width: float, height: float) -> np.ndarray:
    """Pixel-space corners (4, 2) of the ROI, counter-clockwise (y-down)."""
    if not (width > 0 and height > 0):
        raise InvalidImage(f"image dims must be positive, got {width}x{height}")
    return _kernels.quad_corners(
        r.center.x, r.center.y, r.size, r.rotation, float(width), float(height)
    )


def convex_clip(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Intersection polygon of two convex polygons; (k, 2) with k <= 8 for quads."""
    return _kernels.clip_convex(
        np.ascontiguousarray(subject, dtype=np.float64),
        np.ascontiguousarray(clip, dtype=np.float64),
    )


def polygon_area(p: np.ndarray) -> float:
    """Non-negative shoelace area; 0 for fewer than 3 vertices."""
    arr = np.ascontiguousarray(p, dtype=np.float64)
    if arr.size == 0:
        return 0.0
    return float(_kernels.poly_area(arr))


def rotated_iou(a: RotRect, b: RotRect, width: float, height: float) -> float:
    """IoU of two ROIs computed in pixel space after aspect correction."""
    qa = rect_to_quad(a, width, height)
    qb = rect_to_quad(b, width, height)
    if a.size == 0.0 and b.size == 0.0:
        raise DegenerateGeometry("IoU of two zero-area ROIs is undefined")
    return float(_kernels.quad_iou(qa, qb))
