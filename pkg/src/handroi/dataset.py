"""Dataset ingestion and synthesis.

Real data comes in two parts joined by sample id:
  * a directory of per-image annotation files (JSON with a 21x3 "hand_pts"
    array of (x, y, confidence) pixel landmarks and an "is_left" flag),
  * a line-delimited JSON sidecar of externally produced body keypoints,
    one object per line with fields: id, width, height, handedness
    ("left"/"right"), and shoulder/elbow/wrist/thumb/index/pinky, each a
    [x, y, z] triple in normalized image coordinates.

Left-hand samples are mirrored at ingestion so everything downstream sees
right-handed geometry. The synthetic generator replaces both inputs at desk
scale: it poses a canonical 3-D hand, tilts it out of plane, projects it
orthographically, and derives the sparse body keypoints from the projection.
"""

import json
import math
import os
from dataclasses import dataclass

import numpy as np

from .errors import DuplicateId, EmptyDataset, InvalidDataset, ParseError
from .geometry import Vec3
from .heuristic import (
    Hand21,
    INDEX_MCP,
    MIDDLE_MCP,
    PINKY_MCP,
    PoseHand,
    THUMB_LOW,
    WRIST,
    gold_roi,
)

POSE_KEYS = ("shoulder", "elbow", "wrist", "thumb", "index", "pinky")


@dataclass(frozen=True)
class GoldRecord:
    id: str
    hand: Hand21
    is_left: bool


@dataclass(frozen=True)
class Sample:
    id: str
    width: int
    height: int
    hand: Hand21
    pose: PoseHand
    was_left: bool
    split: str


@dataclass
class MergeResult:
    samples: list
    missing_pose: int
    degenerate: int


# ---------------------------------------------------------------------------
# real-data ingestion

def parse_panoptic(labels_dir):
    """Read every annotation file in the directory, lexicographic order.

    Returns (records, skipped) where skipped counts malformed files.
    """
    try:
        names = sorted(os.listdir(labels_dir))
    except OSError as e:
        raise IOError(f"cannot read labels directory {labels_dir}: {e}") from e
    records = []
    skipped = 0
    for name in names:
        path = os.path.join(labels_dir, name)
        if not os.path.isfile(path) or not name.endswith(".json"):
            continue
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
            pts = doc["hand_pts"]
            if len(pts) != 21:
                raise ValueError(f"{len(pts)} landmarks")
            hand = Hand21(
                points=tuple(
                    (float(p[0]), float(p[1]), float(p[2]) if len(p) > 2 else 1.0)
                    for p in pts
                )
            )
            is_left = bool(doc.get("is_left", 0))
        except Exception:
            skipped += 1
            continue
        records.append(GoldRecord(id=os.path.splitext(name)[0], hand=hand, is_left=is_left))
    if not records:
        raise EmptyDataset(f"no parseable annotation files in {labels_dir}")
    return records, skipped


def mirror_left(pose: PoseHand, hand: Hand21, width: float):
    """Reflect x; normalized pose x -> 1-x, pixel landmark x -> width-x."""
    kps = [Vec3(1.0 - kp.x, kp.y, kp.z) for kp in pose.as_tuple()]
    pts = tuple((width - x, y, c) for x, y, c in hand.points)
    return PoseHand(*kps), Hand21(points=pts)


def _parse_sidecar_line(line, lineno):
    try:
        doc = json.loads(line)
        sid = str(doc["id"])
        width = int(doc["width"])
        height = int(doc["height"])
        handedness = doc["handedness"]
        if handedness not in ("left", "right"):
            raise ValueError(f"handedness {handedness!r}")
        if width <= 0 or height <= 0:
            raise ValueError("non-positive image dims")
        kps = []
        for key in POSE_KEYS:
            x, y, z = doc[key]
            kps.append(Vec3(float(x), float(y), float(z)))
    except ParseError:
        raise
    except Exception as e:
        raise ParseError(f"sidecar line {lineno}: {e}") from e
    return sid, width, height, handedness, PoseHand(*kps)


def merge_pose_sidecar(records, sidecar_path, split="train") -> MergeResult:
    """Inner join of gold records with sidecar pose lines on id.

    Records without a pose line are dropped and counted; samples whose gold
    ROI is degenerate are filtered and counted. Left hands are mirrored.
    """
    poses = {}
    with open(sidecar_path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            sid, width, height, handedness, pose = _parse_sidecar_line(line, lineno)
            if sid in poses:
                raise DuplicateId(f"sidecar line {lineno}: duplicate id {sid!r}")
            poses[sid] = (width, height, handedness, pose)

    samples = []
    missing = 0
    degenerate = 0
    for rec in records:
        entry = poses.get(rec.id)
        if entry is None:
            missing += 1
            continue
        width, height, handedness, pose = entry
        hand = rec.hand
        was_left = handedness == "left" or rec.is_left
        if was_left:
            pose, hand = mirror_left(pose, hand, width)
        try:
            gold_roi(hand, width, height)
        except Exception:
            degenerate += 1
            continue
        samples.append(
            Sample(
                id=rec.id,
                width=width,
                height=height,
                hand=hand,
                pose=pose,
                was_left=was_left,
                split=split,
            )
        )
    return MergeResult(samples=samples, missing_pose=missing, degenerate=degenerate)


# ---------------------------------------------------------------------------
# synthetic generation

# canonical right hand, wrist at origin, fingers toward -y, flat (z = 0),
# in hand units; indices follow the standard 21-point topology
HAND_TEMPLATE = np.array(
    [
        [0.00, 0.00, 0.0],    # 0 wrist
        [-0.22, -0.10, 0.0],  # 1-4 thumb
        [-0.36, -0.22, 0.0],
        [-0.45, -0.34, 0.0],
        [-0.51, -0.44, 0.0],
        [-0.15, -0.44, 0.0],  # 5-8 index
        [-0.17, -0.66, 0.0],
        [-0.18, -0.80, 0.0],
        [-0.19, -0.92, 0.0],
        [0.00, -0.46, 0.0],   # 9-12 middle
        [0.00, -0.70, 0.0],
        [0.00, -0.86, 0.0],
        [0.00, -0.99, 0.0],
        [0.13, -0.44, 0.0],   # 13-16 ring
        [0.14, -0.66, 0.0],
        [0.15, -0.80, 0.0],
        [0.16, -0.91, 0.0],
        [0.25, -0.40, 0.0],   # 17-20 pinky
        [0.27, -0.56, 0.0],
        [0.28, -0.68, 0.0],
        [0.29, -0.78, 0.0],
    ]
)

SYNTH_HEIGHT = 480


@dataclass(frozen=True)
class SynthConfig:
    n: int
    seed: int
    noise_px: float = 1.0
    max_tilt_deg: float = 60.0
    rho_min: float = 0.75
    rho_max: float = 1.9

    def __post_init__(self):
        if self.n <= 0:
            raise InvalidDataset("n must be positive")
        if self.noise_px < 0:
            raise InvalidDataset("noise_px must be >= 0")
        if not (0.0 <= self.max_tilt_deg <= 90.0):
            raise InvalidDataset("max_tilt_deg must be in [0, 90]")
        if not (0 < self.rho_min <= self.rho_max):
            raise InvalidDataset("rho range must be positive and ordered")


def _rotation_matrix(phi_deg, tilt_deg, axis_deg):
    """In-plane rotation by phi composed with a tilt about an in-plane axis."""
    t = math.radians(tilt_deg)
    a = math.radians(axis_deg)
    ux, uy = math.cos(a), math.sin(a)
    c, s = math.cos(t), math.sin(t)
    # Rodrigues for axis (ux, uy, 0)
    tilt = np.array(
        [
            [c + ux * ux * (1 - c), ux * uy * (1 - c), uy * s],
            [ux * uy * (1 - c), c + uy * uy * (1 - c), -ux * s],
            [-uy * s, ux * s, c],
        ]
    )
    p = math.radians(phi_deg)
    cp, sp = math.cos(p), math.sin(p)
    inplane = np.array([[cp, -sp, 0.0], [sp, cp, 0.0], [0.0, 0.0, 1.0]])
    return inplane @ tilt


def _make_synth_sample(rng, cfg, idx, split):
    height = SYNTH_HEIGHT
    rho = rng.uniform(cfg.rho_min, cfg.rho_max)
    width = int(round(rho * height))

    phi = rng.uniform(0.0, 360.0)
    tilt = rng.uniform(0.0, cfg.max_tilt_deg)
    axis = rng.uniform(0.0, 360.0)
    rot = _rotation_matrix(phi, tilt, axis)
    scale = rng.uniform(0.18, 0.32) * height
    pts3 = scale * (HAND_TEMPLATE @ rot.T)
    proj = pts3[:, :2]

    margin = 0.06 * min(width, height)
    lo = proj.min(axis=0)
    hi = proj.max(axis=0)
    tx = rng.uniform(margin - lo[0], width - margin - hi[0])
    ty = rng.uniform(margin - lo[1], height - margin - hi[1])
    shift = np.array([tx, ty])

    hand_px = proj + shift + rng.normal(scale=cfg.noise_px, size=(21, 2))
    hand = Hand21(points=tuple((float(x), float(y), 1.0) for x, y in hand_px))

    def pose_point(p3):
        noisy = p3[:2] + shift + rng.normal(scale=cfg.noise_px, size=2)
        z = (p3[2] + rng.normal(scale=cfg.noise_px)) / height
        return Vec3(float(noisy[0] / width), float(noisy[1] / height), float(z))

    wrist3 = pts3[WRIST]
    arm_dir = wrist3 - pts3[MIDDLE_MCP]
    pose = PoseHand(
        shoulder=pose_point(wrist3 + 5.2 * arm_dir),
        elbow=pose_point(wrist3 + 2.3 * arm_dir),
        wrist=pose_point(wrist3),
        thumb=pose_point(pts3[THUMB_LOW]),
        index=pose_point(pts3[INDEX_MCP]),
        pinky=pose_point(pts3[PINKY_MCP]),
    )
    return Sample(
        id=f"synth-{cfg.seed}-{idx:05d}",
        width=width,
        height=height,
        hand=hand,
        pose=pose,
        was_left=False,
        split=split,
    )


def synth_generate(cfg: SynthConfig):
    """Deterministic synthetic samples; 70/30 train/test split by index."""
    rng = np.random.default_rng(cfg.seed)
    n_train = int(round(0.7 * cfg.n))
    samples = []
    for i in range(cfg.n):
        split = "train" if i < n_train else "test"
        while True:
            s = _make_synth_sample(rng, cfg, i, split)
            try:
                gold_roi(s.hand, s.width, s.height)
            except Exception:
                continue
            break
        samples.append(s)
    return samples


# ---------------------------------------------------------------------------
# aggregation and file format

def dataset_stats(samples, filtered=0):
    """Counts per split and handedness plus the degenerate-filtered count."""
    out = {
        "n": len(samples),
        "train": sum(1 for s in samples if s.split == "train"),
        "test": sum(1 for s in samples if s.split == "test"),
        "was_left": sum(1 for s in samples if s.was_left),
        "filtered": filtered,
    }
    return out


def sample_to_dict(s: Sample) -> dict:
    return {
        "id": s.id,
        "width": s.width,
        "height": s.height,
        "split": s.split,
        "was_left": s.was_left,
        "hand": [[x, y, c] for x, y, c in s.hand.points],
        "pose": {k: [kp.x, kp.y, kp.z] for k, kp in zip(POSE_KEYS, s.pose.as_tuple())},
    }


def sample_from_dict(d: dict) -> Sample:
    hand = Hand21(points=tuple((float(x), float(y), float(c)) for x, y, c in d["hand"]))
    pose = PoseHand(*[Vec3(*map(float, d["pose"][k])) for k in POSE_KEYS])
    return Sample(
        id=str(d["id"]),
        width=int(d["width"]),
        height=int(d["height"]),
        hand=hand,
        pose=pose,
        was_left=bool(d["was_left"]),
        split=str(d["split"]),
    )


def write_samples(samples, path):
    with open(path, "w", encoding="utf-8") as fh:
        for s in samples:
            fh.write(json.dumps(sample_to_dict(s), sort_keys=True, separators=(",", ":")))
            fh.write("\n")


def read_samples(path):
    samples = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                samples.append(sample_from_dict(json.loads(line)))
            except Exception as e:
                raise ParseError(f"{path} line {lineno}: {e}") from e
    if not samples:
        raise EmptyDataset(f"no samples in {path}")
    return samples
