"""CNN encoder + single-layer LSTM decoder over the 7-token vocabulary.

The encoder's flattened global feature is resized by a linear layer and
concatenated to every embedded token fed to the decoder; one linear head
maps hidden states to token logits.
"""

from dataclasses import dataclass, field, asdict

import torch
from torch import nn

from .vocab import BOS, EOS, VOCAB_SIZE


@dataclass
class ModelConfig:
    image_size: int = 128
    conv_channels: tuple = (8, 16, 32, 64)
    kernel_size: int = 3
    feature_dim: int = 128
    embed_dim: int = 32
    hidden_dim: int = 256
    max_decode_len: int = 128
    learning_rate: float = 0.00025
    epochs: int = 50
    batch_size: int = 32
    grad_clip: float = 5.0
    scheme: str = "fused"
    teacher_forcing: bool = False
    fixed_angle: float = None
    seed: int = 0

    def as_dict(self):
        d = asdict(self)
        d["conv_channels"] = list(self.conv_channels)
        return d

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "conv_channels" in d:
            d["conv_channels"] = tuple(d["conv_channels"])
        return cls(**d)


class Captioner(nn.Module):
    def __init__(self, config):
        super().__init__()
        self.config = config
        layers = []
        in_ch = 1
        for out_ch in config.conv_channels:
            layers += [nn.Conv2d(in_ch, out_ch, config.kernel_size,
                                 padding=config.kernel_size // 2),
                       nn.ReLU(),
                       nn.MaxPool2d(2)]
            in_ch = out_ch
        self.encoder = nn.Sequential(*layers)
        side = config.image_size // (2 ** len(config.conv_channels))
        self.project = nn.Linear(in_ch * side * side, config.feature_dim)
        self.embed = nn.Embedding(VOCAB_SIZE, config.embed_dim)
        self.lstm = nn.LSTM(config.embed_dim + config.feature_dim,
                            config.hidden_dim, num_layers=1,
                            batch_first=True)
        self.head = nn.Linear(config.hidden_dim, VOCAB_SIZE)

    def encode(self, images):
        """(B, H, W) binary images -> (B, feature_dim) global features."""
        x = self.encoder(images.unsqueeze(1))
        return self.project(x.flatten(1))

    def step(self, tokens, features, state):
        """One decode step: (B,) token ids -> (B, V) logits, next state."""
        emb = self.embed(tokens)
        inp = torch.cat([emb, features], dim=1).unsqueeze(1)
        out, state = self.lstm(inp, state)
        return self.head(out.squeeze(1)), state

    def unroll(self, images, targets, teacher_forcing=False):
        """Decode for the targets' length; returns (B, L, V) logits.

        ``targets`` is (B, L) including the final EOS column.  Without
        teacher forcing the decoder consumes its own greedy predictions;
        with it, the ground-truth tokens.
        """
        features = self.encode(images)
        batch = images.shape[0]
        tokens = torch.full((batch,), BOS, dtype=torch.long,
                            device=images.device)
        state = None
        logits = []
        for t in range(targets.shape[1]):
            step_logits, state = self.step(tokens, features, state)
            logits.append(step_logits)
            if teacher_forcing:
                tokens = targets[:, t]
            else:
                tokens = step_logits.argmax(dim=1).detach()
        return torch.stack(logits, dim=1)

    @torch.no_grad()
    def greedy_decode(self, images, max_len):
        """Greedy decoding from BOS; returns (token id lists, terminated)."""
        features = self.encode(images)
        batch = images.shape[0]
        tokens = torch.full((batch,), BOS, dtype=torch.long,
                            device=images.device)
        state = None
        done = torch.zeros(batch, dtype=torch.bool)
        seqs = [[] for _ in range(batch)]
        for _ in range(max_len):
            logits, state = self.step(tokens, features, state)
            tokens = logits.argmax(dim=1)
            for b in range(batch):
                if not done[b]:
                    seqs[b].append(int(tokens[b]))
            done |= tokens.cpu() == EOS
            if bool(done.all()):
                break
        terminated = [bool(d) for d in done]
        return seqs, terminated

    @torch.no_grad()
    def teacher_forced_logprobs(self, images, targets, lengths):
        """Log-probability of each ground-truth token (EOS included)."""
        logits = self.unroll(images, targets, teacher_forcing=True)
        logprobs = torch.log_softmax(logits, dim=2)
        picked = logprobs.gather(2, targets.unsqueeze(2)).squeeze(2)
        return [picked[b, :lengths[b]].tolist()
                for b in range(images.shape[0])]
