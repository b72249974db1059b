"""Benchmark the numba-compiled geometry kernels against the numpy fallback.

Times rotated-box IoU over random ROI pairs in both backends by re-running
itself in a subprocess with HANDROI_NO_NUMBA toggled.

    python benchmarks/bench_geometry.py [--pairs 200000]
"""

import argparse
import os
import subprocess
import sys
import time


def run_worker(pairs):
    import numpy as np

    from handroi import backend
    from handroi.geometry import RotRect, Vec2, rotated_iou

    rng = np.random.default_rng(42)
    rects = [
        RotRect(
            Vec2(rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)),
            rng.uniform(0.05, 0.6),
            rng.uniform(0, 360),
        )
        for _ in range(2 * min(pairs, 2000))
    ]
    # warm-up triggers JIT compilation so it is not timed
    rotated_iou(rects[0], rects[1], 640, 480)

    t0 = time.perf_counter()
    acc = 0.0
    n = len(rects) // 2
    reps = max(1, pairs // n)
    for _ in range(reps):
        for i in range(n):
            acc += rotated_iou(rects[2 * i], rects[2 * i + 1], 640, 480)
    elapsed = time.perf_counter() - t0
    total = reps * n
    label = "numba" if backend.USE_NUMBA else "numpy"
    print(f"{label}: {total} IoU pairs in {elapsed:.3f}s "
          f"({total / elapsed:.0f} pairs/s, checksum {acc:.3f})")


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--pairs", type=int, default=200_000)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()
    if args.worker:
        run_worker(args.pairs)
        return
    for no_numba in ("0", "1"):
        env = dict(os.environ, HANDROI_NO_NUMBA=no_numba)
        subprocess.run(
            [sys.executable, __file__, "--worker", "--pairs", str(args.pairs)],
            env=env,
            check=True,
        )


if __name__ == "__main__":
    main()
