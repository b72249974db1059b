import math

import numpy as np
import pytest

from handroi.errors import DegenerateGeometry, InvalidAspect, InvalidImage
from handroi.geometry import (
    RotRect,
    Vec2,
    angle_deg,
    aspect_distance,
    circular_diff_deg,
    convex_clip,
    normalize_deg,
    polygon_area,
    rect_to_quad,
    rotate_vec,
    rotated_iou,
)
from conftest import monte_carlo_iou, random_rect

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


class TestAngleDeg:
    def test_positive_x_axis(self):
        assert angle_deg(Vec2(0, 0), Vec2(1, 0)) == 0.0

    def test_straight_up(self):
        assert angle_deg(Vec2(0.5, 0.8), Vec2(0.5, 0.5)) == pytest.approx(-90.0)

    def test_diagonal_y_down(self):
        assert angle_deg(Vec2(0, 0), Vec2(1, 1)) == pytest.approx(45.0)

    def test_coincident_raises(self):
        with pytest.raises(DegenerateGeometry):
            angle_deg(Vec2(0.3, 0.3), Vec2(0.3, 0.3))

    def test_range(self, rng):
        for _ in range(200):
            a = Vec2(rng.uniform(-1, 1), rng.uniform(-1, 1))
            b = Vec2(rng.uniform(-1, 1) + 2, rng.uniform(-1, 1))
            assert -180.0 < angle_deg(a, b) <= 180.0


class TestRotateVec:
    def test_identity(self):
        v = rotate_vec(Vec2(1, 0), 0)
        assert (v.x, v.y) == (1.0, 0.0)

    def test_quarter_turn(self):
        v = rotate_vec(Vec2(0, -0.08), 90)
        assert v.x == pytest.approx(0.08, abs=1e-12)
        assert v.y == pytest.approx(0.0, abs=1e-12)

    def test_full_turn(self):
        v = rotate_vec(Vec2(1, 0), 360)
        assert v.x == pytest.approx(1.0, abs=1e-12)
        assert v.y == pytest.approx(0.0, abs=1e-12)

    def test_norm_preserved(self, rng):
        for _ in range(200):
            v = Vec2(rng.uniform(-2, 2), rng.uniform(-2, 2))
            th = rng.uniform(-720, 720)
            r = rotate_vec(v, th)
            assert math.hypot(r.x, r.y) == pytest.approx(math.hypot(v.x, v.y), abs=1e-12)


class TestAspectDistance:
    def test_pure_y(self):
        assert aspect_distance(Vec2(0, 0), Vec2(0, 0.5), 2.0) == pytest.approx(0.5)

    def test_x_scaled(self):
        assert aspect_distance(Vec2(0.2, 0.5), Vec2(0.4, 0.5), 2.0) == pytest.approx(0.4)

    def test_coincident(self):
        assert aspect_distance(Vec2(0.1, 0.1), Vec2(0.1, 0.1), 1.5) == 0.0

    def test_bad_rho(self):
        with pytest.raises(InvalidAspect):
            aspect_distance(Vec2(0, 0), Vec2(1, 1), 0.0)
        with pytest.raises(InvalidAspect):
            aspect_distance(Vec2(0, 0), Vec2(1, 1), -1.0)


class TestRectToQuad:
    def test_square_image_axis_aligned(self):
        r = RotRect(Vec2(0.5, 0.5), 0.5, 0.0)
        q = rect_to_quad(r, 100, 100)
        got = {(round(x), round(y)) for x, y in q}
        assert got == {(25, 25), (25, 75), (75, 75), (75, 25)}

    def test_zero_size_degenerate(self):
        r = RotRect(Vec2(0.5, 0.5), 0.0, 0.0)
        q = rect_to_quad(r, 100, 100)
        assert np.allclose(q, q[0])
        assert polygon_area(q) == 0.0

    def test_aspect_correction_square_in_pixels(self):
        r = RotRect(Vec2(0.5, 0.5), 0.5, 0.0)
        q = rect_to_quad(r, 200, 100)
        xs, ys = q[:, 0], q[:, 1]
        assert xs.min() == pytest.approx(75) and xs.max() == pytest.approx(125)
        assert ys.min() == pytest.approx(25) and ys.max() == pytest.approx(75)
        assert np.mean(xs) == pytest.approx(100) and np.mean(ys) == pytest.approx(50)

    def test_invalid_dims(self):
        r = RotRect(Vec2(0.5, 0.5), 0.5, 0.0)
        with pytest.raises(InvalidImage):
            rect_to_quad(r, 0, 100)

    def test_orientation_positive_shoelace(self, rng):
        # CCW contract: signed shoelace sum stays non-negative for any rotation
        for _ in range(100):
            r = random_rect(rng)
            q = rect_to_quad(r, 640, 480)
            s = 0.0
            for i in range(4):
                j = (i + 1) % 4
                s += q[i, 0] * q[j, 1] - q[j, 0] * q[i, 1]
            assert s > 0


class TestConvexClip:
    def test_identical(self):
        out = convex_clip(UNIT_SQUARE, UNIT_SQUARE)
        assert polygon_area(out) == pytest.approx(1.0, abs=1e-9)

    def test_disjoint(self):
        far = UNIT_SQUARE + 10.0
        assert convex_clip(UNIT_SQUARE, far).shape[0] == 0

    def test_rotated_square_octagon(self):
        c = np.array([0.5, 0.5])
        th = math.radians(45)
        rot = np.array(
            [[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]]
        )
        rotated = (UNIT_SQUARE - c) @ rot.T + c
        out = convex_clip(UNIT_SQUARE, rotated)
        assert out.shape[0] == 8
        assert polygon_area(out) == pytest.approx(2 * (math.sqrt(2) - 1), abs=1e-9)


class TestPolygonArea:
    def test_empty_and_small(self):
        assert polygon_area(np.empty((0, 2))) == 0.0
        assert polygon_area(np.array([[0.0, 0.0], [1.0, 1.0]])) == 0.0

    def test_unit_square(self):
        assert polygon_area(UNIT_SQUARE) == 1.0

    def test_triangle(self):
        assert polygon_area(np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 2.0]])) == 2.0


class TestRotatedIou:
    def test_self(self):
        r = RotRect(Vec2(0.4, 0.6), 0.3, 33.0)
        assert rotated_iou(r, r, 640, 480) == pytest.approx(1.0, abs=1e-12)

    def test_disjoint(self):
        a = RotRect(Vec2(0.1, 0.1), 0.05, 0.0)
        b = RotRect(Vec2(0.9, 0.9), 0.05, 0.0)
        assert rotated_iou(a, b, 640, 480) == 0.0

    def test_rotated_45_is_inv_sqrt2(self):
        a = RotRect(Vec2(0.5, 0.5), 0.4, 0.0)
        b = RotRect(Vec2(0.5, 0.5), 0.4, 45.0)
        assert rotated_iou(a, b, 500, 500) == pytest.approx(1 / math.sqrt(2), abs=1e-9)

    def test_both_degenerate_raises(self):
        a = RotRect(Vec2(0.5, 0.5), 0.0, 0.0)
        with pytest.raises(DegenerateGeometry):
            rotated_iou(a, a, 100, 100)

    def test_one_degenerate_is_zero(self):
        a = RotRect(Vec2(0.5, 0.5), 0.0, 0.0)
        b = RotRect(Vec2(0.5, 0.5), 0.3, 0.0)
        assert rotated_iou(a, b, 100, 100) == 0.0

    def test_symmetry(self, rng):
        for _ in range(50):
            a, b = random_rect(rng), random_rect(rng)
            assert rotated_iou(a, b, 640, 480) == pytest.approx(
                rotated_iou(b, a, 640, 480), abs=1e-12
            )

    def test_square_symmetry_90deg(self, rng):
        for _ in range(50):
            a, b = random_rect(rng), random_rect(rng)
            b90 = RotRect(b.center, b.size, normalize_deg(b.rotation + 90))
            assert rotated_iou(a, b, 640, 480) == pytest.approx(
                rotated_iou(a, b90, 640, 480), abs=1e-9
            )

    def test_monte_carlo_agreement_small(self, rng):
        # quick version of the acceptance check (fewer pairs/points)
        for _ in range(10):
            a, b = random_rect(rng), random_rect(rng)
            exact = rotated_iou(a, b, 640, 480)
            mc = monte_carlo_iou(a, b, 640, 480, 200_000, rng)
            assert exact == pytest.approx(mc, abs=0.01)


class TestCircularDiff:
    def test_equal(self):
        assert circular_diff_deg(10, 10) == 0.0

    def test_wraparound(self):
        assert circular_diff_deg(350, 10) == pytest.approx(20.0)

    def test_modular_identity(self):
        assert circular_diff_deg(180, -180) == 0.0

    def test_symmetry_and_period(self, rng):
        for _ in range(200):
            a = rng.uniform(-720, 720)
            b = rng.uniform(-720, 720)
            k = rng.integers(-3, 4)
            assert circular_diff_deg(a, b) == pytest.approx(circular_diff_deg(b, a))
            assert circular_diff_deg(a, a + 360.0 * k) == pytest.approx(0.0, abs=1e-9)
            assert 0.0 <= circular_diff_deg(a, b) <= 180.0
