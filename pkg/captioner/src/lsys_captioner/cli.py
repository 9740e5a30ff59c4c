"""captioner CLI: train / predict, configured via flags or --config JSON."""

import argparse
import json
import sys

from .model import ModelConfig
from . import predict as predict_mod
from . import train as train_mod


def _config_from_args(args):
    base = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            base = json.load(fh)
    for key in ("epochs", "seed", "scheme", "learning_rate", "image_size",
                "batch_size", "fixed_angle"):
        val = getattr(args, key.replace("-", "_"), None)
        if val is not None:
            base[key] = val
    if getattr(args, "teacher_forcing", False):
        base["teacher_forcing"] = True
    return ModelConfig.from_dict(base)


def cmd_train(args):
    config = _config_from_args(args)
    ckpt, rows = train_mod.train(args.manifest, config, args.out_dir,
                                 stop_at_exact_match=args.stop_at_exact_match)
    print(f"checkpoint: {ckpt}")
    print(f"final loss {rows[-1]['loss']:.4f}  "
          f"train exact match {rows[-1]['train_exact_match']:.3f}")
    return 0


def cmd_predict(args):
    records = predict_mod.predict(args.checkpoint, args.manifest,
                                  args.images, args.out, split=args.split,
                                  max_len=args.max_len)
    print(f"wrote {len(records)} predictions to {args.out}")
    return 0


def build_parser():
    top = argparse.ArgumentParser(prog="captioner")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--config", help="ModelConfig JSON file")
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--scheme", choices=("char", "fused"), default=None)
    p.add_argument("--learning-rate", type=float, default=None)
    p.add_argument("--image-size", type=int, default=None)
    p.add_argument("--batch-size", type=int, default=None)
    p.add_argument("--teacher-forcing", action="store_true",
                   help="ablation only; default trains on own predictions")
    p.add_argument("--fixed-angle", type=float, default=None,
                   help="train on one fixed rotation angle instead of "
                        "fresh per-epoch angles")
    p.add_argument("--stop-at-exact-match", type=float, default=None,
                   help="stop early once train exact match reaches this")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--images", required=True,
                   help="directory of fixed-angle PGM images")
    p.add_argument("--out", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--max-len", type=int, default=None)
    p.set_defaults(func=cmd_predict)
    return top


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
