"""Command-line entry point.

Subcommands: derive, generate, render, canonicalize, validate, evaluate,
diff.  Words come from stdin (one per line) or --in; results go to stdout
or --out.  Exit codes: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import canonical, core, dataset, harness, render
from .backend import BACKEND
from .canonical import GENERIC_ANGLE
from .errors import LsysError


def _seed(value):
    if value is not None:
        return value
    env = os.environ.get("LSYS_SEED")
    return int(env) if env else 0


def _read_words(args):
    if getattr(args, "infile", None):
        with open(args.infile, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = sys.stdin.read().splitlines()
    return [ln.strip() for ln in lines if ln.strip()]


def _out_stream(args):
    if getattr(args, "out", None):
        return open(args.out, "w", encoding="utf-8", newline="\n")
    return sys.stdout


def _grammar(args):
    if getattr(args, "grammar", None):
        return dataset.load_grammar(args.grammar)
    return core.default_grammar()


def cmd_derive(args):
    word = core.derive(_grammar(args), args.steps, _seed(args.seed))
    print(word.text)
    return 0


def cmd_generate(args):
    lo, hi = args.derivation_min, args.derivation_max
    config = dataset.GenerationConfig(
        target_unique=args.target,
        derivation_range=(lo, hi),
        angle_range=(args.angle_min, args.angle_max),
        step_len=args.f,
        image_size=args.size,
        master_seed=_seed(args.seed),
        scheme=args.scheme,
        grammar=_grammar(args),
    )
    manifest = dataset.generate(config)
    dataset.save_manifest(manifest, args.out)
    if not manifest.complete:
        print(f"warning: only {len(manifest.entries)} of "
              f"{args.target} unique words after {manifest.attempts} "
              "attempts", file=sys.stderr)
    if args.materialize:
        dataset.render_epoch(manifest, 0, args.materialize,
                             fixed_angle=args.angle)
    print(f"wrote {len(manifest.entries)} entries to {args.out}",
          file=sys.stderr)
    return 0


def cmd_render(args):
    if args.manifest:
        manifest = dataset.load_manifest(args.manifest)
        paths = dataset.render_epoch(
            manifest, args.epoch_seed, args.out_dir,
            image_size=args.size, fixed_angle=args.angle, fmt=args.format)
        print(f"wrote {len(paths)} images to {args.out_dir}",
              file=sys.stderr)
        return 0
    words = _read_words(args)
    os.makedirs(args.out_dir, exist_ok=True)
    size = args.size or 512
    for i, text in enumerate(words):
        word = core.parse(text, args.scheme)
        img = render.render_word(word, args.delta, args.f, size)
        path = os.path.join(args.out_dir, f"{i}.{args.format}")
        img.save_png(path) if args.format == "png" else img.save_pgm(path)
    print(f"wrote {len(words)} images to {args.out_dir}", file=sys.stderr)
    return 0


def cmd_canonicalize(args):
    out = _out_stream(args)
    for text in _read_words(args):
        word = core.parse(text, args.scheme)
        out.write(canonical.rewrite_canonical(word).text + "\n")
    if out is not sys.stdout:
        out.close()
    return 0


def cmd_validate(args):
    out = _out_stream(args)
    any_violation = False
    for n, text in enumerate(_read_words(args)):
        try:
            word = core.parse(text, args.scheme)
            violations = canonical.check(word, args.delta, args.f)
        except LsysError as exc:
            violations = [canonical.RuleViolation(0, None, str(exc))]
        if violations:
            any_violation = True
        if args.json:
            row = {"line": n, "word": text,
                   "violations": [v.as_dict() for v in violations]}
            out.write(json.dumps(row) + "\n")
        else:
            for v in violations:
                out.write(f"line {n}: rule {v.rule} at {v.location}: "
                          f"{v.description}\n")
    if out is not sys.stdout:
        out.close()
    return 1 if any_violation else 0


def cmd_evaluate(args):
    manifest = dataset.load_manifest(args.manifest)
    records, rejects = harness.load_predictions(args.predictions)
    for lineno, reason in rejects:
        print(f"rejected line {lineno}: {reason}", file=sys.stderr)
    report = harness.evaluate(manifest, records, scheme=args.scheme,
                              max_len=args.max_len)
    report["schema_rejects"] = len(rejects)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
    print(harness.format_report(report))
    return 0


def cmd_diff(args):
    truth = core.parse(args.truth, args.scheme)
    pred = core.parse(args.pred, args.scheme)
    img = harness.diff_render(pred, truth, args.delta, args.f, args.size)
    harness.save_rgb_png(img, args.out)
    print(f"wrote {args.out}", file=sys.stderr)
    return 0


def _add_word_io(p):
    p.add_argument("--in", dest="infile", help="word file (default: stdin)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--scheme", choices=core.SCHEMES,
                   default=core.FUSED_SCHEME)


def build_parser():
    top = argparse.ArgumentParser(
        prog="lsystool",
        description="Generate, canonicalize, render, and evaluate "
                    "bracketed turtle words (kernel backend: %s)." % BACKEND)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("derive", help="derive one word from a grammar")
    p.add_argument("--grammar", help="grammar JSON file")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_derive)

    p = sub.add_parser("generate", help="build a dataset manifest")
    p.add_argument("--target", type=int, default=2000)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="manifest JSONL path")
    p.add_argument("--grammar", help="grammar JSON file")
    p.add_argument("--derivation-min", type=int, default=1)
    p.add_argument("--derivation-max", type=int, default=7)
    p.add_argument("--angle-min", type=float, default=15.0)
    p.add_argument("--angle-max", type=float, default=60.0)
    p.add_argument("--f", type=float, default=100.0)
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--scheme", choices=core.SCHEMES,
                   default=core.FUSED_SCHEME)
    p.add_argument("--materialize", metavar="DIR",
                   help="also render one fixed-angle image set")
    p.add_argument("--angle", type=float, default=37.5,
                   help="fixed angle for --materialize")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("render", help="render words or a manifest")
    p.add_argument("--in", dest="infile")
    p.add_argument("--manifest")
    p.add_argument("--epoch-seed", type=int, default=0)
    p.add_argument("--angle", type=float, default=None,
                   help="fixed angle instead of per-entry draws")
    p.add_argument("--delta", type=float, default=GENERIC_ANGLE)
    p.add_argument("--f", type=float, default=100.0)
    p.add_argument("--size", type=int, default=None)
    p.add_argument("--format", choices=("pgm", "png"), default="pgm")
    p.add_argument("--scheme", choices=core.SCHEMES,
                   default=core.FUSED_SCHEME)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("canonicalize",
                       help="rewrite words to canonical form")
    _add_word_io(p)
    p.set_defaults(func=cmd_canonicalize)

    p = sub.add_parser("validate", help="report rule violations")
    _add_word_io(p)
    p.add_argument("--delta", type=float, default=GENERIC_ANGLE)
    p.add_argument("--f", type=float, default=100.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("evaluate", help="score a predictions file")
    p.add_argument("--manifest", required=True)
    p.add_argument("--predictions", required=True)
    p.add_argument("--scheme", choices=core.SCHEMES, default=None)
    p.add_argument("--max-len", type=int, default=None)
    p.add_argument("--out", help="report JSON path")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("diff", help="render truth/prediction diff image")
    p.add_argument("--truth", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--delta", type=float, default=GENERIC_ANGLE)
    p.add_argument("--f", type=float, default=100.0)
    p.add_argument("--size", type=int, default=512)
    p.add_argument("--scheme", choices=core.SCHEMES,
                   default=core.FUSED_SCHEME)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_diff)

    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except LsysError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
