"""Geometric hand ROI estimation.

`calc_hand_roi` is the incumbent estimator: the hand center is extrapolated
from the index and pinky knuckles, the size from the wrist distance, and the
box is rotated to align with the wrist->center direction. Distances, angles
and the center shift are all computed in aspect-corrected space (x * rho, y)
so the resulting ROI is square in pixels.

`gold_roi` builds the reference ROI from 21 annotated landmarks by rotating
them into the wrist->middle-knuckle frame and bounding them with a square.
"""

import math
from dataclasses import dataclass

from .errors import DegenerateHand, InvalidAspect, InvalidImage
from .geometry import (
    RotRect,
    Vec2,
    Vec3,
    angle_deg,
    aspect_distance,
    normalize_deg,
    rotate_vec,
)

# landmark indices in the standard 21-point hand topology
WRIST = 0
THUMB_LOW = 2
INDEX_MCP = 5
MIDDLE_MCP = 9
PINKY_MCP = 17

SIZE_SCALE = 2.7
CENTER_SHIFT = -0.1


@dataclass(frozen=True)
class PoseHand:
    """Six body keypoints of one hand, normalized coords, already mirrored if left."""

    shoulder: Vec3
    elbow: Vec3
    wrist: Vec3
    thumb: Vec3
    index: Vec3
    pinky: Vec3

    def as_tuple(self):
        return (self.shoulder, self.elbow, self.wrist, self.thumb, self.index, self.pinky)


@dataclass(frozen=True)
class Hand21:
    """21 annotated hand landmarks in pixel coords: list of (x, y, confidence)."""

    points: tuple

    def __post_init__(self):
        if len(self.points) != 21:
            raise DegenerateHand(f"expected 21 landmarks, got {len(self.points)}")
        for x, y, c in self.points:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise DegenerateHand("non-finite landmark coordinate")
            if not (0.0 <= c <= 1.0):
                raise DegenerateHand(f"confidence {c} outside [0, 1]")


def calc_hand_roi(wrist: Vec2, index: Vec2, pinky: Vec2, rho: float) -> RotRect:
    """ROI from wrist + index/pinky knuckles (the incumbent estimator)."""
    if not (rho > 0) or not math.isfinite(rho):
        raise InvalidAspect(f"aspect ratio must be > 0, got {rho}")
    center = Vec2((2 * index.x + pinky.x) / 3.0, (2 * index.y + pinky.y) / 3.0)
    size = 2.0 * aspect_distance(center, wrist, rho)
    if size == 0.0:
        raise DegenerateHand("wrist coincides with estimated hand center")
    # angle measured in aspect-corrected space so it matches the pixel frame
    rotation = normalize_deg(
        angle_deg(Vec2(wrist.x * rho, wrist.y), Vec2(center.x * rho, center.y)) + 90.0
    )
    shift = rotate_vec(Vec2(0.0, CENTER_SHIFT * size), rotation)
    center = Vec2(center.x + shift.x / rho, center.y + shift.y)
    return RotRect(center=center, size=SIZE_SCALE * size, rotation=rotation)


def closed_form_size(wrist: Vec2, index: Vec2, pinky: Vec2, rho: float) -> float:
    """Single-expression equivalent of the estimator's size computation."""
    if not (rho > 0) or not math.isfinite(rho):
        raise InvalidAspect(f"aspect ratio must be > 0, got {rho}")
    cx = (2 * index.x + pinky.x) / 3.0
    cy = (2 * index.y + pinky.y) / 3.0
    return 5.4 * math.sqrt(rho ** 2 * (wrist.x - cx) ** 2 + (wrist.y - cy) ** 2)


def gold_roi(hand: Hand21, width: float, height: float, scale: float = 2.0) -> RotRect:
    """Reference ROI bounding all 21 landmarks, aligned to the wrist->middle-MCP axis."""
    if not (width > 0 and height > 0):
        raise InvalidImage(f"image dims must be positive, got {width}x{height}")
    pts = [(p[0], p[1]) for p in hand.points]
    wx, wy = pts[WRIST]
    mx, my = pts[MIDDLE_MCP]
    if wx == mx and wy == my:
        raise DegenerateHand("wrist coincides with middle knuckle")
    if all(p == pts[0] for p in pts[1:]):
        raise DegenerateHand("all landmarks coincide")

    rotation = normalize_deg(angle_deg(Vec2(wx, wy), Vec2(mx, my)) + 90.0)
    cx = sum(p[0] for p in pts) / 21.0
    cy = sum(p[1] for p in pts) / 21.0

    th = math.radians(-rotation)
    c, s = math.cos(th), math.sin(th)
    rx = [(p[0] - cx) * c - (p[1] - cy) * s for p in pts]
    ry = [(p[0] - cx) * s + (p[1] - cy) * c for p in pts]
    lo_x, hi_x = min(rx), max(rx)
    lo_y, hi_y = min(ry), max(ry)
    side = max(hi_x - lo_x, hi_y - lo_y)

    # box center in the rotated frame, mapped back to the image frame
    bx = (lo_x + hi_x) / 2.0
    by = (lo_y + hi_y) / 2.0
    back = rotate_vec(Vec2(bx, by), rotation)
    center_px = Vec2(cx + back.x, cy + back.y)

    return RotRect(
        center=Vec2(center_px.x / width, center_px.y / height),
        size=side * scale / height,
        rotation=rotation,
    )
