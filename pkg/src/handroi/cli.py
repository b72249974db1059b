"""Command-line pipeline: synth/ingest -> train -> eval -> compare/render.

Every command is deterministic given its flags, writes a `.manifest.json`
next to each main output echoing the effective configuration, and uses a
fixed exit-code contract:

    0 success, 1 internal error, 2 usage or missing input,
    3 data mismatch between files, 4 id not found.

Relative paths are resolved against --data-dir, or the HANDROI_DATA_DIR
environment variable when the flag is absent.
"""

import argparse
import json
import os
import sys

from . import dataset as ds
from . import metrics as mx
from . import model as md
from . import svg as svgmod
from .errors import (
    DegenerateHand,
    EmptyDataset,
    HandRoiError,
    JoinError,
    ParseError,
    WeightsFormatError,
)
from .geometry import rect_to_quad
from .heuristic import calc_hand_roi, gold_roi

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_MISMATCH = 3
EXIT_NOT_FOUND = 4


class NotFound(HandRoiError):
    pass


class UsageError(HandRoiError):
    pass


def _resolve(path, args):
    if path is None or os.path.isabs(path):
        return path
    base = args.data_dir or os.environ.get("HANDROI_DATA_DIR")
    return os.path.join(base, path) if base else path


def _write_manifest(out_path, command, config, counts):
    doc = {"command": command, "config": config, "counts": counts}
    with open(f"{out_path}.manifest.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _predictor_fn(method, weights_path, gold_scale):
    """Sample -> RotRect closure for one method tag."""
    if method == "gold":
        return lambda s: gold_roi(s.hand, s.width, s.height, scale=gold_scale)
    if method == "heuristic":
        return lambda s: calc_hand_roi(
            s.pose.wrist.xy(), s.pose.index.xy(), s.pose.pinky.xy(), s.width / s.height
        )
    if weights_path is None:
        raise UsageError(f"method {method!r} requires --weights")
    predictor = md.load_weights(weights_path)
    if method == "mlp":
        return lambda s: md.predict_roi(
            predictor, md.featurize(s.pose, s.width / s.height)
        )
    if method == "hybrid":
        return lambda s: md.hybrid_predict(predictor, s.pose, s.width / s.height)
    raise UsageError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# commands

def cmd_synth(args):
    cfg = ds.SynthConfig(
        n=args.n,
        seed=args.seed,
        noise_px=args.noise_px,
        max_tilt_deg=args.max_tilt_deg,
        rho_min=args.rho_min,
        rho_max=args.rho_max,
    )
    samples = ds.synth_generate(cfg)
    out = _resolve(args.out, args)
    ds.write_samples(samples, out)
    _write_manifest(
        out,
        "synth",
        {
            "n": cfg.n,
            "seed": cfg.seed,
            "noise_px": cfg.noise_px,
            "max_tilt_deg": cfg.max_tilt_deg,
            "rho_min": cfg.rho_min,
            "rho_max": cfg.rho_max,
        },
        ds.dataset_stats(samples),
    )
    print(f"wrote {len(samples)} samples to {out}")
    return EXIT_OK


def cmd_ingest(args):
    if not args.train_labels and not args.test_labels:
        raise UsageError("need --train-labels and/or --test-labels")
    sidecar = _resolve(args.sidecar, args)
    if not os.path.isfile(sidecar):
        raise UsageError(f"sidecar file not found: {sidecar}")
    samples = []
    counts = {}
    for split, labels in (("train", args.train_labels), ("test", args.test_labels)):
        if not labels:
            continue
        records, skipped = ds.parse_panoptic(_resolve(labels, args))
        res = ds.merge_pose_sidecar(records, sidecar, split=split)
        samples.extend(res.samples)
        counts[split] = {
            "annotations": len(records),
            "malformed_files": skipped,
            "missing_pose": res.missing_pose,
            "degenerate": res.degenerate,
            "kept": len(res.samples),
        }
    if not samples:
        raise EmptyDataset("no samples survived ingestion")
    out = _resolve(args.out, args)
    ds.write_samples(samples, out)
    _write_manifest(
        out,
        "ingest",
        {
            "train_labels": args.train_labels,
            "test_labels": args.test_labels,
            "sidecar": args.sidecar,
        },
        {**counts, "total": ds.dataset_stats(samples)},
    )
    print(f"wrote {len(samples)} samples to {out}")
    return EXIT_OK


def cmd_train(args):
    samples = ds.read_samples(_resolve(args.dataset, args))
    train = [s for s in samples if s.split == "train"]
    cfg = md.TrainConfig(
        learning_rate=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
        seed=args.seed,
        validation_fraction=args.val_fraction,
        optimizer=args.optimizer,
        angle_mode=args.angle_mode,
    )
    predictor, logs = md.train_predictor(train, cfg, gold_scale=args.gold_scale)
    out = _resolve(args.out, args)
    md.save_weights(predictor, out)
    with open(f"{out}.log", "w", encoding="utf-8") as fh:
        for head in ("center", "size", "angle"):
            for epoch, tr, val in logs[head]:
                fh.write(f"{head} {epoch} {tr!r} {val!r}\n")
    _write_manifest(
        out,
        "train",
        {
            "dataset": args.dataset,
            "learning_rate": cfg.learning_rate,
            "batch_size": cfg.batch_size,
            "epochs": cfg.epochs,
            "seed": cfg.seed,
            "validation_fraction": cfg.validation_fraction,
            "optimizer": cfg.optimizer,
            "angle_mode": cfg.angle_mode,
            "gold_scale": args.gold_scale,
        },
        {
            "train_samples": len(train),
            "best_val": {h: min(v for _, _, v in logs[h]) for h in logs},
        },
    )
    print(f"wrote weights to {out}")
    return EXIT_OK


def cmd_eval(args):
    samples = ds.read_samples(_resolve(args.dataset, args))
    test = [s for s in samples if s.split == "test"]
    if not test:
        raise EmptyDataset("dataset has no test split")
    method = "gold" if args.gold_as_predictor else args.method
    weights = _resolve(args.weights, args)
    if weights is not None and not os.path.isfile(weights):
        raise UsageError(f"weights file not found: {weights}")
    predict = _predictor_fn(method, weights, args.gold_scale)
    rows, summary = mx.evaluate(predict, test, gold_scale=args.gold_scale, method=method)
    out = _resolve(args.out, args)
    mx.write_rows_csv(rows, out)
    summary_path = args.summary or f"{out}.summary.txt"
    mx.write_summary(summary, _resolve(summary_path, args))
    _write_manifest(
        out,
        "eval",
        {
            "dataset": args.dataset,
            "method": method,
            "weights": args.weights,
            "gold_scale": args.gold_scale,
        },
        {"test_samples": len(test), **summary.as_dict()},
    )
    print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def cmd_compare(args):
    rows_a = mx.read_rows_csv(_resolve(args.rows_a, args))
    rows_b = mx.read_rows_csv(_resolve(args.rows_b, args))
    name_a = rows_a[0].method if rows_a else "a"
    name_b = rows_b[0].method if rows_b else "b"
    wr_ab = mx.win_rate(rows_a, rows_b)
    wr_ba = mx.win_rate(rows_b, rows_a)
    sum_a = mx.summarize(rows_a)
    sum_b = mx.summarize(rows_b)

    report = _resolve(args.report, args)
    with open(report, "w", encoding="utf-8") as fh:
        fh.write(f"method_a={name_a}\n")
        fh.write(f"method_b={name_b}\n")
        fh.write(f"n={sum_a.n}\n")
        fh.write(f"win_rate_a_over_b={wr_ab!r}\n")
        fh.write(f"win_rate_b_over_a={wr_ba!r}\n")
        for tag, summ in (("a", sum_a), ("b", sum_b)):
            for key, val in summ.as_dict().items():
                fh.write(f"{tag}_{key}={val!r}\n")
        fh.write(f"min_iou_pair={sum_a.min_iou!r} vs {sum_b.min_iou!r}\n")

    svg_path = args.svg or f"{report}.svg"
    hist_a = mx.iou_histogram(rows_a, bins=args.bins)
    hist_b = mx.iou_histogram(rows_b, bins=args.bins)
    svg = svgmod.histogram_svg([(name_a, hist_a), (name_b, hist_b)], bins=args.bins)
    with open(_resolve(svg_path, args), "w", encoding="utf-8") as fh:
        fh.write(svg)
    _write_manifest(
        report,
        "compare",
        {"rows_a": args.rows_a, "rows_b": args.rows_b, "bins": args.bins},
        {
            "n": sum_a.n,
            "win_rate_a_over_b": wr_ab,
            "win_rate_b_over_a": wr_ba,
        },
    )
    print(f"wrote report to {report}")
    return EXIT_OK


def cmd_render(args):
    samples = ds.read_samples(_resolve(args.dataset, args))
    matches = [s for s in samples if s.id == args.id]
    if not matches:
        raise NotFound(f"sample id {args.id!r} not in dataset")
    s = matches[0]
    gold = gold_roi(s.hand, s.width, s.height, scale=args.gold_scale)
    gold_quad = rect_to_quad(gold, s.width, s.height)
    pred_quads = []
    weights = _resolve(args.weights, args)
    if weights is not None and not os.path.isfile(weights):
        raise UsageError(f"weights file not found: {weights}")
    predict = _predictor_fn(args.method, weights, args.gold_scale)
    try:
        pred = predict(s)
        pred_quads.append(rect_to_quad(pred, s.width, s.height))
    except DegenerateHand:
        print(f"warning: degenerate prediction for {s.id}, rendering gold only", file=sys.stderr)
    out = _resolve(args.out, args)
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(svgmod.boxes_svg(s.width, s.height, gold_quad, pred_quads))
    _write_manifest(
        out,
        "render",
        {
            "dataset": args.dataset,
            "id": args.id,
            "method": args.method,
            "weights": args.weights,
            "gold_scale": args.gold_scale,
        },
        {"predictions": len(pred_quads)},
    )
    print(f"wrote {out}")
    return EXIT_OK


# ---------------------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(
        prog="handroi", description="Hand ROI prediction and evaluation pipeline"
    )
    parser.add_argument(
        "--data-dir",
        default=None,
        help="base directory for relative paths (overrides HANDROI_DATA_DIR)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--noise-px", type=float, default=1.0)
    p.add_argument("--max-tilt-deg", type=float, default=60.0)
    p.add_argument("--rho-min", type=float, default=0.75)
    p.add_argument("--rho-max", type=float, default=1.9)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest", help="ingest annotation labels + pose sidecar")
    p.add_argument("--train-labels", default=None)
    p.add_argument("--test-labels", default=None)
    p.add_argument("--sidecar", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train the three-headed MLP predictor")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--epochs", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--val-fraction", type=float, default=0.1)
    p.add_argument("--optimizer", choices=("sgd", "adam"), default="adam")
    p.add_argument("--angle-mode", choices=("sincos", "scalar"), default="sincos")
    p.add_argument("--gold-scale", type=float, default=2.0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate one method on the test split")
    p.add_argument("--dataset", required=True)
    p.add_argument("--method", choices=("heuristic", "mlp", "hybrid"), default="heuristic")
    p.add_argument("--weights", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", default=None)
    p.add_argument("--gold-scale", type=float, default=2.0)
    p.add_argument(
        "--gold-as-predictor",
        action="store_true",
        help="debug: score the gold ROI against itself",
    )
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("compare", help="compare two row files")
    p.add_argument("--rows-a", required=True)
    p.add_argument("--rows-b", required=True)
    p.add_argument("--report", required=True)
    p.add_argument("--svg", default=None)
    p.add_argument("--bins", type=int, default=20)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("render", help="schematic SVG of gold and predicted boxes")
    p.add_argument("--dataset", required=True)
    p.add_argument("--id", required=True)
    p.add_argument("--method", choices=("heuristic", "mlp", "hybrid"), default="heuristic")
    p.add_argument("--weights", default=None)
    p.add_argument("--gold-scale", type=float, default=2.0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except JoinError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_MISMATCH
    except NotFound as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_FOUND
    except (UsageError, EmptyDataset, ParseError, WeightsFormatError, FileNotFoundError, IOError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except HandRoiError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
