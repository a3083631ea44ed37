"""radpose command line: simulate, preprocess, train, eval, bench, profiles."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from radpose.dsp_baseline import baseline_features
from radpose.pipeline import bench, cube_files, default_axes, front_end
from radpose.profiles import BUILTIN, emit_profile, load_profile
from radpose.regressor import MlpShape, TrainConfig, load_weights, majpe, pa_majpe, prn_forward, save_weights, train
from radpose.simulator import iter_skeleton_dataset
from radpose.ssp import build_spatial_mask
from radpose.tensor_io import format_record, parse_record, read_cube, read_pose_set, write_cube, write_pose_set


def encode_vector(x: np.ndarray) -> str:
    return ",".join(repr(float(v)) for v in x)


def decode_vector(s: str) -> np.ndarray:
    return np.array([float(v) for v in s.split(",")], dtype=np.float64) if s else np.zeros(0)


def mask_hex(mask: np.ndarray) -> str:
    return np.packbits(np.asarray(mask, dtype=bool).ravel()).tobytes().hex()


def read_feature_records(path) -> tuple[np.ndarray, np.ndarray]:
    """(frame indices, feature matrix) from a preprocess output file."""
    frames, rows = [], []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                rec = parse_record(line)
                frames.append(int(rec["frame"]))
                rows.append(decode_vector(str(rec["features"])))
    if not rows:
        raise ValueError(f"{path}: no feature records")
    order = np.argsort(frames, kind="stable")
    return np.asarray(frames)[order], np.stack(rows)[order]


def preprocess_cube(cube, profile, frontend: str = "physics") -> dict:
    axes = cube.axes or default_axes(cube.dims)
    if frontend == "physics":
        fe = front_end(cube, profile, axes)
        return {"features": fe.features, "motion_mask": fe.motion_mask}
    roi = build_spatial_mask(profile.bounds, axes)
    return {"features": baseline_features(cube, roi, profile.cfar)}


def _profile(args):
    prof = load_profile(args.profile)
    return prof.paper_literal() if getattr(args, "paper_literal_pooling", False) else prof


def cmd_simulate(args) -> None:
    out = Path(args.out)
    (out / "cubes").mkdir(parents=True, exist_ok=True)
    poses = []
    for i, (cube, pose) in enumerate(iter_skeleton_dataset(args.frames, seed=args.seed)):
        with open(out / "cubes" / f"frame_{i:06d}.radc", "wb") as fh:
            write_cube(cube, fh)
        poses.append(pose)
    with open(out / "poses.pose", "wb") as fh:
        write_pose_set(np.stack(poses), fh)
    print(format_record({"frames": args.frames, "seed": args.seed, "out": str(out)}))


def cmd_preprocess(args) -> None:
    prof = _profile(args)
    lines = []
    for i, path in enumerate(cube_files(args.dataset)):
        with open(path, "rb") as fh:
            cube = read_cube(fh)
        res = preprocess_cube(cube, prof, args.frontend)
        rec = {"frame": i, "profile": prof.name, "frontend": args.frontend,
               "dim": len(res["features"]), "features": encode_vector(res["features"])}
        if "motion_mask" in res:
            rec["motion_mask"] = mask_hex(res["motion_mask"])
        lines.append(format_record(rec))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_poses(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return read_pose_set(fh).astype(np.float64)


def cmd_train(args) -> None:
    _, x = read_feature_records(args.features)
    y = _load_poses(args.poses)
    if len(y) != len(x):
        raise ValueError(f"{len(x)} feature rows but {len(y)} poses")
    cfg = TrainConfig(lr=args.lr, epochs=args.epochs, batch_size=args.batch_size, seed=args.seed)
    shape = MlpShape(x.shape[1], args.h1, args.h2, y[0].size)
    res = train(x, y.reshape(len(y), -1), cfg, shape)
    with open(args.out, "wb") as fh:
        save_weights(res.weights, fh)
    print(format_record({"epochs": args.epochs, "final_loss_sq_mm": res.losses[-1] if res.losses else 0.0}))


def cmd_eval(args) -> None:
    with open(args.weights, "rb") as fh:
        w = load_weights(fh)
    _, x = read_feature_records(args.features)
    gt = _load_poses(args.poses)
    if len(gt) != len(x):
        raise ValueError(f"{len(x)} feature rows but {len(gt)} poses")
    pred = prn_forward(w, x).reshape(gt.shape)
    print(format_record({"frames": len(gt), "majpe": majpe(pred, gt), "pa_majpe": pa_majpe(pred, gt)}))


def cmd_bench(args) -> None:
    weights = None
    if args.weights:
        with open(args.weights, "rb") as fh:
            weights = load_weights(fh)
    for name in args.profile:
        prof = load_profile(name)
        if args.paper_literal_pooling:
            prof = prof.paper_literal()
        rep = bench(args.dataset, prof, reps=args.reps, warmup=args.warmup, weights=weights)
        print(format_record(rep.to_record()), flush=True)


def cmd_profiles(args) -> None:
    if args.out is None:
        for prof in BUILTIN.values():
            sys.stdout.write(emit_profile(prof) + "\n")
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for prof in BUILTIN.values():
        (out / (prof.name.lower() + ".profile")).write_text(emit_profile(prof))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="radpose", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="synthetic skeleton dataset -> RADC cubes + POSE file")
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("preprocess", help="RADC cubes -> feature records")
    p.add_argument("dataset")
    p.add_argument("--profile", default="Balanced")
    p.add_argument("--frontend", choices=("physics", "cfar"), default="physics")
    p.add_argument("--paper-literal-pooling", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="fit the pose regressor")
    p.add_argument("features")
    p.add_argument("poses")
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--h1", type=int, default=512)
    p.add_argument("--h2", type=int, default=512)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="majpe / pa_majpe of saved weights")
    p.add_argument("features")
    p.add_argument("poses")
    p.add_argument("--weights", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("bench", help="per-stage latency")
    p.add_argument("dataset")
    p.add_argument("--profile", action="append", default=None)
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--warmup", type=int, default=10)
    p.add_argument("--weights")
    p.add_argument("--paper-literal-pooling", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("profiles", help="emit the built-in profiles")
    p.add_argument("--out")
    p.set_defaults(func=cmd_profiles)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "profile", "x") is None:
        args.profile = ["Balanced"]
    try:
        args.func(args)
    except (OSError, ValueError, RuntimeError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"radpose {args.command}: {msg}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
