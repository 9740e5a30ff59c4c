"""Seeded corpus generation: unique canonical words, splits, renders.

The persistent artifact is a JSON Lines manifest.  Line 1 is a header
record {version, config, max_seq_len, complete, attempts}; every further
line is {id, word, split}.  Images are re-rendered per epoch with fresh
angles, or materialized once at a fixed angle for evaluation.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, asdict

import numpy as np

from . import canonical, core, render
from .canonical import GENERIC_ANGLE
from .core import FUSED_SCHEME, Grammar, Production, parse

MANIFEST_VERSION = 1
ATTEMPT_BUDGET_FACTOR = 50

SPLIT_NAMES = ("train", "val", "test")


@dataclass(frozen=True)
class GenerationConfig:
    target_unique: int = 2000
    derivation_range: tuple = (1, 7)
    angle_range: tuple = (15.0, 60.0)
    step_len: float = 100.0
    image_size: int = 128
    split: tuple = (0.9, 0.05, 0.05)
    master_seed: int = 0
    scheme: str = FUSED_SCHEME
    validation_angle: float = GENERIC_ANGLE
    grammar: Grammar = field(default_factory=core.default_grammar)

    def __post_init__(self):
        if abs(sum(self.split) - 1.0) > 1e-9:
            raise core.LsysError("split fractions must sum to 1")
        lo, hi = self.derivation_range
        if not 1 <= lo <= hi:
            raise core.LsysError("bad derivation range")

    def as_dict(self):
        d = asdict(self)
        d["grammar"] = grammar_to_dict(self.grammar)
        d["derivation_range"] = list(self.derivation_range)
        d["angle_range"] = list(self.angle_range)
        d["split"] = list(self.split)
        return d


@dataclass(frozen=True)
class ManifestEntry:
    id: int
    word: str
    split: str

    def token_len(self, scheme):
        return len(parse(self.word, scheme))


@dataclass(frozen=True)
class DatasetManifest:
    version: int
    config: dict
    entries: tuple
    max_seq_len: int
    complete: bool = True
    attempts: int = 0

    def split_entries(self, split):
        return [e for e in self.entries if e.split == split]

    def by_id(self):
        return {e.id: e for e in self.entries}


def split_sizes(n, fractions):
    """Largest-remainder apportionment of n items over the split fractions."""
    raw = [n * f for f in fractions]
    sizes = [int(x) for x in raw]
    rem = n - sum(sizes)
    order = sorted(range(len(raw)), key=lambda i: raw[i] - sizes[i],
                   reverse=True)
    for i in order[:rem]:
        sizes[i] += 1
    return sizes


def generate(config):
    """Sample, canonicalize, filter, and dedup words until target_unique.

    Deterministic for a fixed master_seed: every per-attempt derivation
    seed and the split shuffle come from one PCG64 stream.
    """
    rng = np.random.default_rng(config.master_seed)
    lo, hi = config.derivation_range
    budget = ATTEMPT_BUDGET_FACTOR * config.target_unique
    seen = set()
    words = []
    attempts = 0
    while len(words) < config.target_unique and attempts < budget:
        attempts += 1
        steps = int(rng.integers(lo, hi + 1))
        seed = int(rng.integers(0, 2**63 - 1))
        raw = core.derive(config.grammar, steps, seed)
        cooked = canonical.rewrite_canonical(raw)
        text = cooked.text
        if text in seen:
            continue
        if canonical.check(cooked, config.validation_angle, config.step_len):
            continue
        if config.scheme == FUSED_SCHEME:
            try:
                parse(text, FUSED_SCHEME)
            except core.LsysError:
                continue
        seen.add(text)
        words.append(text)

    n = len(words)
    sizes = split_sizes(n, config.split)
    tags = np.array([name for name, k in zip(SPLIT_NAMES, sizes)
                     for _ in range(k)], dtype=object)
    perm = rng.permutation(n)
    assigned = [None] * n
    for pos, idx in enumerate(perm):
        assigned[idx] = tags[pos]

    entries = tuple(ManifestEntry(i, w, assigned[i])
                    for i, w in enumerate(words))
    max_len = max((e.token_len(config.scheme) for e in entries), default=0)
    return DatasetManifest(MANIFEST_VERSION, config.as_dict(), entries,
                           max_len, complete=(n == config.target_unique),
                           attempts=attempts)


# ---------------------------------------------------------------------------
# manifest / grammar files

def save_manifest(manifest, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        header = {"version": manifest.version, "config": manifest.config,
                  "max_seq_len": manifest.max_seq_len,
                  "complete": manifest.complete,
                  "attempts": manifest.attempts}
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for e in manifest.entries:
            fh.write(json.dumps({"id": e.id, "word": e.word,
                                 "split": e.split}, sort_keys=True) + "\n")


def load_manifest(path):
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        entries = tuple(ManifestEntry(r["id"], r["word"], r["split"])
                        for r in map(json.loads, fh) if r)
    return DatasetManifest(header["version"], header["config"], entries,
                           header["max_seq_len"],
                           header.get("complete", True),
                           header.get("attempts", 0))


def grammar_to_dict(grammar):
    return {"axiom": grammar.axiom,
            "productions": [{"lhs": p.predecessor, "rhs": p.successor,
                             "p": p.probability}
                            for p in grammar.productions],
            "angle": grammar.angle_deg,
            "f": grammar.step_len}


def grammar_from_dict(d):
    prods = tuple(Production(r["lhs"], r["rhs"], r["p"])
                  for r in d["productions"])
    return Grammar(d["axiom"], prods,
                   d.get("angle", 25.0), d.get("f", 100.0))


def load_grammar(path):
    with open(path, encoding="utf-8") as fh:
        return grammar_from_dict(json.load(fh))


# ---------------------------------------------------------------------------
# rendering

def entry_angle(epoch_seed, entry_id, angle_range):
    """Per-entry augmentation angle, independent across entries."""
    lo, hi = angle_range
    sub = np.random.default_rng(np.random.SeedSequence([int(epoch_seed),
                                                        int(entry_id)]))
    return float(lo + (hi - lo) * sub.random())


def render_epoch(manifest, epoch_seed, output_dir, image_size=None,
                 fixed_angle=None, fmt="pgm"):
    """Render every entry to ``output_dir``/<id>.pgm (or .png).

    Angles are drawn per (epoch_seed, id) unless ``fixed_angle`` is given.
    Deterministic; returns the list of written paths.
    """
    cfg = manifest.config
    size = image_size or cfg["image_size"]
    scheme = cfg.get("scheme", FUSED_SCHEME)
    os.makedirs(output_dir, exist_ok=True)
    paths = []
    for e in manifest.entries:
        angle = (fixed_angle if fixed_angle is not None
                 else entry_angle(epoch_seed, e.id, cfg["angle_range"]))
        img = render.render_word(parse(e.word, scheme), angle,
                                 cfg["step_len"], size)
        path = os.path.join(output_dir, f"{e.id}.{fmt}")
        if fmt == "png":
            img.save_png(path)
        else:
            img.save_pgm(path)
        paths.append(path)
    return paths
