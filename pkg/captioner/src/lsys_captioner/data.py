"""Dataset access through lsystool's external interfaces only.

Reads the manifest JSONL and PGM image files; fresh per-epoch renders are
produced by shelling out to the ``lsystool render`` CLI so the two
packages stay coupled only through documented formats.
"""

import json
import os
import subprocess

import numpy as np

from . import vocab


def load_manifest(path):
    """Returns (header dict, list of entry dicts {id, word, split})."""
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        entries = [json.loads(ln) for ln in fh if ln.strip()]
    return header, entries


def read_pgm(path):
    """P5 PGM -> float32 array with foreground 1.0, background 0.0."""
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise ValueError(f"{path}: not a binary PGM")
    # header: magic, width height, maxval, single whitespace, raster
    parts = data.split(b"\n", 3)
    width, height = map(int, parts[1].split())
    raster = np.frombuffer(parts[3], dtype=np.uint8).reshape(height, width)
    return (raster == 0).astype(np.float32)


def render_epoch_images(manifest_path, epoch_seed, out_dir, fixed_angle=None):
    """Invoke the lsystool CLI to render one epoch's image set."""
    cmd = ["lsystool", "render", "--manifest", str(manifest_path),
           "--epoch-seed", str(epoch_seed), "--out-dir", str(out_dir)]
    if fixed_angle is not None:
        cmd += ["--angle", str(fixed_angle)]
    subprocess.run(cmd, check=True, capture_output=True)
    return out_dir


def load_images(image_dir, entry_ids):
    return np.stack([read_pgm(os.path.join(image_dir, f"{i}.pgm"))
                     for i in entry_ids])


def encode_entries(entries, scheme):
    """Per-entry body ids plus the longest body length."""
    ids = [vocab.encode(e["word"], scheme) for e in entries]
    return ids, max((len(s) for s in ids), default=0)
