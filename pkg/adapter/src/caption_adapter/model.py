"""A small causal transformer LM with a conditioning-derived prefix.

The conditioning bytes (an image path, a key, anything the two parties
share) are hashed into a fixed block of prefix embeddings that steers the
whole generation, the same shape a captioning model uses to condition text
on an image. Weights are randomly initialized from the seed in the model
identifier, so the distributions are a deterministic function of
(identifier, conditioning, context) without any downloaded checkpoint;
swap in a trained model behind the same interface for production use.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import torch
from torch import nn

torch.set_num_threads(1)


@dataclass(frozen=True)
class AdapterConfig:
    """Parsed model identifier plus serving options."""

    model: str = "tiny"
    device: str = "cpu"
    top_n: int = 512
    digits: int = 6  # wire protocol fixes six-decimal quantization
    seed: int = 0
    vocab_size: int = 256
    n_layers: int = 2
    n_heads: int = 2
    dim: int = 64
    prefix_len: int = 4
    max_context: int = 512

    def __post_init__(self) -> None:
        if self.top_n < 2:
            raise ValueError("top_n must be >= 2")
        if self.digits != 6:
            raise ValueError("quantization is fixed at six digits")
        if self.device != "cpu":
            raise ValueError("only cpu inference is supported")

    @classmethod
    def parse(cls, identifier: str, top_n: int = 512, device: str = "cpu") -> "AdapterConfig":
        name, _, rest = identifier.partition(":")
        if name != "tiny":
            raise ValueError(f"unknown model {name!r}")
        overrides = {"seed": 0, "vocab": 256, "layers": 2, "heads": 2,
                     "dim": 64, "prefix": 4}
        for part in filter(None, rest.split(",")):
            key, _, value = part.partition("=")
            if key not in overrides:
                raise ValueError(f"unknown model option {key!r}")
            overrides[key] = int(value)
        return cls(
            model=identifier,
            device=device,
            top_n=top_n,
            seed=overrides["seed"],
            vocab_size=overrides["vocab"],
            n_layers=overrides["layers"],
            n_heads=overrides["heads"],
            dim=overrides["dim"],
            prefix_len=overrides["prefix"],
        )


class TinyCaptionLM(nn.Module):
    EOS_ID = 0

    def __init__(self, config: AdapterConfig):
        super().__init__()
        self.config = config
        torch.manual_seed(config.seed)
        total_positions = config.prefix_len + config.max_context
        self.token_embedding = nn.Embedding(config.vocab_size, config.dim)
        self.position_embedding = nn.Embedding(total_positions, config.dim)
        layer = nn.TransformerEncoderLayer(
            d_model=config.dim,
            nhead=config.n_heads,
            dim_feedforward=4 * config.dim,
            dropout=0.0,
            activation="gelu",
            batch_first=True,
            norm_first=True,
        )
        self.blocks = nn.TransformerEncoder(layer, num_layers=config.n_layers,
                                            enable_nested_tensor=False)
        self.final_norm = nn.LayerNorm(config.dim)
        self.head = nn.Linear(config.dim, config.vocab_size, bias=False)
        self.eval()

    def prefix_for(self, conditioning: bytes) -> torch.Tensor:
        """Deterministic prefix embeddings derived from the conditioning."""
        digest = hashlib.sha256(b"prefix:" + conditioning).digest()
        generator = torch.Generator(device="cpu")
        generator.manual_seed(int.from_bytes(digest[:8], "little"))
        return torch.randn(
            self.config.prefix_len, self.config.dim, generator=generator
        )

    @torch.no_grad()
    def next_token_logits(self, prefix: torch.Tensor, context: list[int]) -> torch.Tensor:
        if len(context) >= self.config.max_context:
            raise ValueError(f"context exceeds {self.config.max_context} tokens")
        pieces = [prefix]
        if context:
            pieces.append(self.token_embedding(torch.tensor(context)))
        hidden = torch.cat(pieces, dim=0)
        positions = torch.arange(hidden.shape[0])
        hidden = hidden + self.position_embedding(positions)
        mask = nn.Transformer.generate_square_subsequent_mask(hidden.shape[0])
        hidden = self.blocks(hidden.unsqueeze(0), mask=mask,
                             is_causal=True).squeeze(0)
        return self.head(self.final_norm(hidden[-1]))


def floored_top_entries(logits: torch.Tensor, top_n: int) -> list[tuple[int, float]]:
    """Top-N probabilities floored to six decimals, zeros dropped, sorted by
    descending probability then ascending id. Flooring keeps the emitted
    total mass <= 1, which the wire protocol requires."""
    probs = torch.softmax(logits.double(), dim=0)
    count = min(top_n, probs.shape[0])
    values, ids = torch.topk(probs, count)
    entries = []
    for token, prob in zip(ids.tolist(), values.tolist()):
        micro = int(prob * 1_000_000)
        if micro > 0:
            entries.append((token, micro / 1_000_000))
    entries.sort(key=lambda e: (-e[1], e[0]))
    return entries
