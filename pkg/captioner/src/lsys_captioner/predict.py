"""Greedy decoding + teacher-forced scoring into the predictions JSONL."""

import json

import torch

from . import data
from .model import Captioner, ModelConfig
from .train import pad_targets
from .vocab import EOS


def load_checkpoint(path):
    ckpt = torch.load(path, map_location="cpu", weights_only=False)
    config = ModelConfig.from_dict(ckpt["config"])
    model = Captioner(config)
    model.load_state_dict(ckpt["model_state"])
    model.eval()
    return model, config, ckpt["max_len"]


def predict(checkpoint_path, manifest_path, image_dir, out_path,
            split="test", max_len=None, batch_size=64):
    """Write harness-format predictions for one manifest split.

    Greedy decode gives pred_tokens/terminated; a teacher-forced pass over
    the ground truth gives per-step logprobs (EOS position included).
    """
    model, config, ckpt_max_len = load_checkpoint(checkpoint_path)
    header, entries = data.load_manifest(manifest_path)
    if header["config"].get("scheme", "fused") != config.scheme:
        raise ValueError("checkpoint/manifest tokenization scheme mismatch")
    chosen = [e for e in entries if split == "all" or e["split"] == split]
    if not chosen:
        raise ValueError(f"no entries in split {split!r}")
    max_len = max_len or ckpt_max_len

    records = []
    for start in range(0, len(chosen), batch_size):
        batch = chosen[start:start + batch_size]
        ids = [e["id"] for e in batch]
        images = torch.from_numpy(data.load_images(image_dir, ids))
        id_lists, _ = data.encode_entries(batch, config.scheme)
        seqs, terminated = model.greedy_decode(images, max_len)
        targets, lengths = pad_targets(id_lists, images.device)
        logprobs = model.teacher_forced_logprobs(images,
                                                 targets.clamp(min=0),
                                                 lengths)
        for i, e in enumerate(batch):
            records.append({
                "id": e["id"],
                "pred_tokens": seqs[i],
                "terminated": terminated[i],
                "logprobs": [min(lp, 0.0) for lp in logprobs[i]],
            })

    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        for row in records:
            fh.write(json.dumps(row) + "\n")
    return records
