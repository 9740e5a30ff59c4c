"""Training loop: fresh-angle renders per epoch, no teacher forcing.

Loss is cross-entropy against the ground-truth token at every position
(EOS included, padding masked), accumulated over the model's own greedy
decoding path unless --teacher-forcing is set.
"""

import csv
import math
import os
import shutil
import tempfile

import numpy as np
import torch
from torch import nn

from . import data
from .model import Captioner, ModelConfig
from .vocab import EOS

PAD = -100  # ignore_index for padded positions


def pad_targets(id_lists, device):
    """Body ids + EOS, right-padded; returns (targets, lengths)."""
    lengths = [len(s) + 1 for s in id_lists]
    width = max(lengths)
    out = torch.full((len(id_lists), width), PAD, dtype=torch.long)
    for b, seq in enumerate(id_lists):
        out[b, :len(seq)] = torch.tensor(seq)
        out[b, len(seq)] = EOS
    return out.to(device), lengths


def exact_match_fraction(model, images, id_lists, max_len):
    model.eval()
    seqs, terminated = model.greedy_decode(images, max_len)
    hits = 0
    for seq, truth, term in zip(seqs, id_lists, terminated):
        body = seq[:-1] if (term and seq and seq[-1] == EOS) else seq
        if term and body == truth:
            hits += 1
    return hits / max(len(id_lists), 1)


def train(manifest_path, config, out_dir, log_every=1, quiet=False,
          stop_at_exact_match=None):
    """Train on the manifest's train split; writes checkpoint + CSV log.

    Returns (checkpoint_path, rows) where rows are the per-epoch log
    records {epoch, loss, train_exact_match}. When stop_at_exact_match
    is set, training ends early once the train exact-match fraction
    reaches that threshold.
    """
    torch.manual_seed(config.seed)
    os.makedirs(out_dir, exist_ok=True)
    header, entries = data.load_manifest(manifest_path)
    train_entries = [e for e in entries if e["split"] == "train"]
    if not train_entries:
        raise ValueError("manifest has no train entries")
    ids = [e["id"] for e in train_entries]
    id_lists, longest = data.encode_entries(train_entries, config.scheme)
    max_len = max(config.max_decode_len, 2 * (longest + 1))

    device = torch.device("cpu")
    model = Captioner(config).to(device)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    # halve the step size late in the run; self-fed decoding makes the
    # loss surface jumpy once most words are nearly memorized
    scheduler = torch.optim.lr_scheduler.MultiStepLR(
        optimizer, milestones=[int(config.epochs * 0.7),
                               int(config.epochs * 0.9)], gamma=0.5)
    loss_fn = nn.CrossEntropyLoss(ignore_index=PAD)
    rng = np.random.default_rng(config.seed)

    render_root = tempfile.mkdtemp(prefix="captioner_epochs_")
    fixed_images = None
    rows = []
    try:
        for epoch in range(config.epochs):
            if fixed_images is not None:
                images = fixed_images
            else:
                epoch_dir = os.path.join(render_root, str(epoch))
                data.render_epoch_images(manifest_path, epoch, epoch_dir,
                                         fixed_angle=config.fixed_angle)
                images = torch.from_numpy(
                    data.load_images(epoch_dir, ids)).to(device)
                shutil.rmtree(epoch_dir, ignore_errors=True)
                if config.fixed_angle is not None:
                    fixed_images = images

            model.train()
            # length-bucketed batches (random tie-break), shuffled order:
            # padding every batch to the epoch's longest word would waste
            # most of the unroll on short words
            order = rng.permutation(len(ids))
            order = order[np.argsort([len(id_lists[i]) for i in order],
                                     kind="stable")]
            batches = [order[s:s + config.batch_size]
                       for s in range(0, len(order), config.batch_size)]
            batches = [batches[i] for i in rng.permutation(len(batches))]
            total_loss = total_tokens = 0.0
            for idx in batches:
                batch_imgs = images[idx]
                targets, lengths = pad_targets([id_lists[i] for i in idx],
                                               device)
                optimizer.zero_grad()
                logits = model.unroll(batch_imgs, targets.clamp(min=0),
                                      teacher_forcing=config.teacher_forcing)
                loss = loss_fn(logits.reshape(-1, logits.shape[-1]),
                               targets.reshape(-1))
                loss_val = float(loss.detach())
                if not math.isfinite(loss_val):
                    raise RuntimeError(f"loss diverged at epoch {epoch}")
                loss.backward()
                if config.grad_clip is not None:
                    nn.utils.clip_grad_norm_(model.parameters(),
                                             config.grad_clip)
                optimizer.step()
                n_tok = sum(lengths)
                total_loss += loss_val * n_tok
                total_tokens += n_tok

            epoch_loss = total_loss / total_tokens
            # longest+1 suffices for exact match: anything longer differs
            em = exact_match_fraction(model, images, id_lists, longest + 1)
            scheduler.step()
            rows.append({"epoch": epoch, "loss": epoch_loss,
                         "train_exact_match": em})
            if not quiet and epoch % log_every == 0:
                print(f"epoch {epoch:4d}  loss {epoch_loss:.4f}  "
                      f"train_em {em:.3f}")
            if stop_at_exact_match is not None and em >= stop_at_exact_match:
                break
    finally:
        shutil.rmtree(render_root, ignore_errors=True)

    log_path = os.path.join(out_dir, "training_log.csv")
    with open(log_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, ["epoch", "loss", "train_exact_match"])
        writer.writeheader()
        writer.writerows(rows)

    ckpt_path = os.path.join(out_dir, "checkpoint.pt")
    torch.save({"model_state": model.state_dict(),
                "config": config.as_dict(),
                "max_len": max_len}, ckpt_path)
    return ckpt_path, rows
