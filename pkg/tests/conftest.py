import numpy as np
import pytest

from handroi.geometry import RotRect, Vec2, rect_to_quad


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_rect(rng, size_lo=0.05, size_hi=0.8):
    return RotRect(
        center=Vec2(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)),
        size=rng.uniform(size_lo, size_hi),
        rotation=rng.uniform(0.0, 360.0),
    )


def monte_carlo_iou(a, b, width, height, n_points, rng):
    """Independent IoU oracle: uniform point sampling over the union's bbox."""
    qa = rect_to_quad(a, width, height)
    qb = rect_to_quad(b, width, height)
    allpts = np.vstack([qa, qb])
    lo = allpts.min(axis=0)
    hi = allpts.max(axis=0)
    pts = rng.uniform(lo, hi, size=(n_points, 2))

    def inside(quad):
        ok = np.ones(n_points, dtype=bool)
        for i in range(4):
            ax, ay = quad[i]
            bx, by = quad[(i + 1) % 4]
            cross = (bx - ax) * (pts[:, 1] - ay) - (by - ay) * (pts[:, 0] - ax)
            ok &= cross >= 0
        return ok

    in_a = inside(qa)
    in_b = inside(qb)
    union = np.count_nonzero(in_a | in_b)
    if union == 0:
        return 0.0
    return np.count_nonzero(in_a & in_b) / union
