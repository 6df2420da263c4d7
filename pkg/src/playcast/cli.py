"""Command-line entry points: synth, train, eval, sweep, sparsify, serve.

Each subcommand maps onto one library operation, exits 0 on success and
prints a machine-readable JSON error on stderr with a nonzero exit
otherwise. The service bind address comes from ``--host/--port`` or the
``PLAYCAST_BIND`` environment variable (``host:port``).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np


def _parse_seeds(text: str) -> tuple[int, ...]:
    return tuple(int(s) for s in text.split(",") if s != "")


def cmd_synth(args) -> int:
    from .data import SynthParams, assign_splits, synth_plays, write_manifest, write_tracking

    params = SynthParams(frames=args.frames, frame_rate_hz=args.frame_rate)
    plays = synth_plays(args.seed, args.count, params)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    splits = assign_splits([p.match_id for p in plays])
    entries = []
    for play in plays:
        name = f"{play.match_id}.csv"
        write_tracking(out / name, play)
        entries.append((name, splits[play.match_id]))
    write_manifest(out / "manifest.txt", entries)
    print(json.dumps({"plays": len(plays), "manifest": str(out / "manifest.txt")}))
    return 0


def _model_spec(args):
    from .models import ModelSpec

    stride = max(1, round(args.sparsity_s * args.frame_rate))
    return ModelSpec(
        kind=args.kind,
        horizon=args.horizon,
        input_len=args.n_past,
        output_stride=stride,
        order=args.order,
        conditioned=args.conditioned,
        embedding_width=args.embedding,
        decoder_hidden=args.decoder_hidden,
        heads=args.heads,
    )


def cmd_train(args) -> int:
    from .training import STABLE_AUTOREG_LR, TrainConfig, bundle_from_manifest, train

    spec = _model_spec(args)
    data = bundle_from_manifest(args.manifest, spec.window_len, spec.input_len,
                                frame_rate_hz=args.frame_rate)
    lr = STABLE_AUTOREG_LR if args.stable_lr else args.lr
    config = TrainConfig(model=spec, epochs=args.epochs, batch_size=args.batch_size,
                         learning_rate=lr, seeds=_parse_seeds(args.seeds),
                         augment_flips=not args.no_flips, grad_clip=args.grad_clip)

    def log(seed, row):
        if not args.quiet:
            print(f"seed {seed} epoch {row.epoch}: train {row.train_loss:.4f} "
                  f"val {row.val_loss:.4f} lr {row.lr:.2e}", file=sys.stderr)

    result = train(config, data, run_dir=args.out_dir, log=log)
    summary = {str(s): {"best_val": r.best_val, "best_epoch": r.best_epoch,
                        "aborted": r.aborted,
                        "checkpoint": str(r.checkpoint_path) if r.checkpoint_path else None}
               for s, r in result.seeds.items()}
    print(json.dumps({"run_dir": args.out_dir, "seeds": summary}, indent=2))
    return 0 if any(r.aborted is None for r in result.seeds.values()) else 1


def cmd_eval(args) -> int:
    from .evaluation import eval_checkpoints
    from .models import load_model
    from .training import bundle_from_manifest

    model, _ = load_model(args.checkpoint[0])
    spec = model.spec
    data = bundle_from_manifest(args.manifest, spec.window_len, spec.input_len,
                                frame_rate_hz=args.frame_rate)
    split = {"train": data.train, "val": data.val, "test": data.test}[args.split]
    if split is None:
        raise ValueError(f"manifest has no {args.split!r} split")
    stride = max(1, round(args.eval_sparsity_s * args.frame_rate))
    report = eval_checkpoints(args.checkpoint, split, eval_stride=stride, order=args.order)
    out = {
        "eval_stride_steps": stride,
        "overall_l2_cm": report.overall_cm,
        "std_cm": report.std_cm,
        "per_seed": report.per_seed_overall,
    }
    if args.curves:
        import csv as _csv
        t_s = np.arange(1, report.cumulative_cm.size + 1) / args.frame_rate
        with open(args.curves, "w", newline="") as f:
            writer = _csv.writer(f)
            writer.writerow(["t_s", "cumulative_l2_cm"])
            for tv, cv in zip(t_s, report.cumulative_cm):
                writer.writerow([repr(float(tv)), repr(float(cv))])
        out["curves"] = args.curves
    print(json.dumps(out, indent=2))
    return 0


def cmd_sweep(args) -> int:
    from .evaluation import build_experiment_cells, run_sweep
    from .training import bundle_from_manifest

    cells = build_experiment_cells(
        args.experiment, frame_rate_hz=args.frame_rate, horizon=args.horizon,
        input_len=args.n_past, kinds=tuple(args.kinds.split(",")),
        embedding_width=args.embedding, heads=args.heads,
        decoder_hidden=args.decoder_hidden)
    data = bundle_from_manifest(args.manifest, args.horizon + args.n_past, args.n_past,
                                frame_rate_hz=args.frame_rate)
    result = run_sweep(cells, data, args.out_dir, seeds=_parse_seeds(args.seeds),
                       epochs=args.epochs, batch_size=args.batch_size,
                       learning_rate=args.lr, frame_rate_hz=args.frame_rate)
    print(json.dumps({
        "cells": len(cells),
        "reports": len(result.reports),
        "failures": sorted(result.failures),
        "out_dir": args.out_dir,
    }, indent=2))
    return 0 if not result.failures else 1


def cmd_sparsify(args) -> int:
    from .evaluation import l2_error
    from .models.densify import densify_controls_np
    from .motion import control_offsets
    from .models.scene import batch_anchor_state

    blob = json.loads(Path(args.input).read_text())
    agents = blob["agents"]
    past = np.asarray([a["past"] for a in agents], dtype=np.float64)
    dense = np.asarray([a["dense"] for a in agents], dtype=np.float64)
    horizon = dense.shape[1]
    offsets = control_offsets(horizon, args.stride)
    controls = dense[:, np.asarray(offsets) - 1, :]
    pos, derivs = batch_anchor_state(past, args.order)
    interp = densify_controls_np(controls, offsets, pos, derivs, args.order)
    for i, agent in enumerate(agents):
        agent["dense"] = [[float(x), float(y)] for x, y in interp[i]]
        agent["controls"] = [{"offset": off, "position": [float(p[0]), float(p[1])]}
                             for off, p in zip(offsets, controls[i])]
    Path(args.out).write_text(json.dumps(blob, indent=2))
    report = {"stride": args.stride, "order": args.order, "out": args.out}
    if all("future" in a for a in agents):
        future = np.asarray([a["future"] for a in agents], dtype=np.float64)
        report["l2_before_cm"] = l2_error(future, dense).overall_cm
        report["l2_after_cm"] = l2_error(future, interp).overall_cm
    print(json.dumps(report, indent=2))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app, load_models

    pairs = []
    for entry in args.checkpoint:
        if "=" in entry:
            mid, path = entry.split("=", 1)
            pairs.append((mid, path))
        else:
            pairs.append((None, entry))
    models = load_models(pairs)
    app = create_app(models, frame_rate_hz=args.frame_rate,
                     frontend_dir=args.frontend_dir)
    host, port = args.host, args.port
    bind = os.environ.get("PLAYCAST_BIND")
    if bind and args.host is None and args.port is None:
        host, _, port_s = bind.partition(":")
        port = int(port_s or 8000)
    uvicorn.run(app, host=host or "127.0.0.1", port=port or 8000, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="playcast",
                                     description="Sparse trajectory prediction toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic tracking dataset")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--frame-rate", type=float, default=10.0)
    p.set_defaults(fn=cmd_synth)

    def model_flags(p):
        p.add_argument("--kind", default="granma",
                       choices=["lin_ext", "mlp", "simple_gru", "gru_encdec",
                                "red_style", "autoreg_cnn", "granma"])
        p.add_argument("--sparsity-s", type=float, default=0.1,
                       help="seconds between model outputs (0.1 = dense at 10 Hz)")
        p.add_argument("--order", type=int, default=2)
        p.add_argument("--conditioned", action="store_true")
        p.add_argument("--horizon", type=int, default=40)
        p.add_argument("--n-past", type=int, default=10)
        p.add_argument("--embedding", type=int, default=128)
        p.add_argument("--heads", type=int, default=4)
        p.add_argument("--decoder-hidden", type=int, default=None)
        p.add_argument("--frame-rate", type=float, default=10.0)

    p = sub.add_parser("train", help="train one model spec across seeds")
    model_flags(p)
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--lr", type=float, default=0.0005)
    p.add_argument("--stable-lr", action="store_true",
                   help="use the low-rate preset for unstable autoregressive baselines")
    p.add_argument("--seeds", default="0,1,2,3,4,5,6")
    p.add_argument("--no-flips", action="store_true")
    p.add_argument("--grad-clip", type=float, default=None)
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("eval", help="evaluate checkpoints with optional eval-time sparsity")
    p.add_argument("--manifest", required=True)
    p.add_argument("--checkpoint", action="append", required=True)
    p.add_argument("--split", default="test", choices=["train", "val", "test"])
    p.add_argument("--eval-sparsity-s", type=float, default=0.1)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--frame-rate", type=float, default=10.0)
    p.add_argument("--curves", default=None, help="write cumulative-error CSV here")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("sweep", help="run one of the experiment grids")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--experiment", required=True,
                   choices=["training_sparsity", "motion_order", "long_horizon",
                            "conditioning", "eval_sparsity"])
    p.add_argument("--kinds", default="granma")
    p.add_argument("--horizon", type=int, default=40)
    p.add_argument("--n-past", type=int, default=10)
    p.add_argument("--embedding", type=int, default=128)
    p.add_argument("--heads", type=int, default=4)
    p.add_argument("--decoder-hidden", type=int, default=None)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--lr", type=float, default=0.0005)
    p.add_argument("--seeds", default="0,1,2,3,4,5,6")
    p.add_argument("--frame-rate", type=float, default=10.0)
    p.set_defaults(fn=cmd_sweep)

    p = sub.add_parser("sparsify", help="sparsify + interpolate a dense prediction file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stride", type=int, required=True)
    p.add_argument("--order", type=int, default=2)
    p.set_defaults(fn=cmd_sparsify)

    p = sub.add_parser("serve", help="serve predictions over HTTP")
    p.add_argument("--checkpoint", action="append", required=True,
                   help="checkpoint path, or id=path; repeatable")
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--frame-rate", type=float, default=10.0)
    p.add_argument("--frontend-dir", default=None)
    p.set_defaults(fn=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except BrokenPipeError:
        return 1
    except Exception as exc:
        print(json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
              file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
