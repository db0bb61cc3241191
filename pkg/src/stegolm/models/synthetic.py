"""Seeded synthetic distributions: the property-test workhorse.

Each step's distribution is a pure function of (seed, conditioning, context),
derived by hashing them into a PRNG key. Supported shapes:

* ``uniform-K``  K tokens at probability 1/K
* ``zipf-K``     K tokens with probability proportional to 1/rank^a

An optional ``eos=P`` reserves fixed probability P for the end-of-sequence
token (word probabilities are scaled by 1-P); by default EOS never appears,
so sequences only stop at the length cap.
"""

from __future__ import annotations

import hashlib
import random
import struct
from dataclasses import dataclass
from functools import lru_cache

from ..core import NextTokenDistribution, TokenId, Vocabulary, quantize, validate_distribution
from ..errors import UnknownBackendError
from . import DEFAULT_MAX_LEN, ModelSession


@dataclass(frozen=True)
class SyntheticConfig:
    seed: int
    shape_kind: str  # "uniform" | "zipf"
    shape_k: int
    exponent: float = 1.2
    n_words: int = 64
    eos_prob: float = 0.0

    @classmethod
    def parse(cls, args: str) -> "SyntheticConfig":
        fields = {"seed": 0, "shape": "zipf-8", "a": 1.2, "vocab": 64, "eos": 0.0}
        for part in filter(None, args.split(",")):
            key, _, value = part.partition("=")
            if key not in fields:
                raise UnknownBackendError(f"unknown synthetic option {key!r}")
            fields[key] = value
        try:
            kind, _, k = str(fields["shape"]).partition("-")
            if kind not in ("uniform", "zipf"):
                raise ValueError(f"unknown shape {kind!r}")
            return cls(
                seed=int(fields["seed"]),
                shape_kind=kind,
                shape_k=int(k),
                exponent=float(fields["a"]),
                n_words=int(fields["vocab"]),
                eos_prob=float(fields["eos"]),
            )
        except ValueError as exc:
            raise UnknownBackendError(f"bad synthetic spec {args!r}: {exc}") from None

    def __post_init__(self) -> None:
        if self.shape_k < 1 or self.n_words < 1:
            raise UnknownBackendError("shape size and vocab must be positive")
        if not 0.0 <= self.eos_prob < 1.0:
            raise UnknownBackendError("eos probability must be in [0, 1)")


@lru_cache(maxsize=65536)
def _synthetic_dist(config: SyntheticConfig, conditioning: bytes,
                    context: tuple[TokenId, ...]) -> NextTokenDistribution:
    digest = hashlib.blake2b(digest_size=8)
    digest.update(struct.pack("<q", config.seed))
    digest.update(conditioning)
    digest.update(b"|")
    for token in context:
        digest.update(struct.pack("<i", token))
    rng = random.Random(int.from_bytes(digest.digest(), "little"))

    k = min(config.shape_k, config.n_words)
    ids = rng.sample(range(config.n_words), k)
    if config.shape_kind == "uniform":
        weights = [1.0] * k
    else:
        weights = [1.0 / (rank + 1) ** config.exponent for rank in range(k)]
    total = sum(weights)
    scale = (1.0 - config.eos_prob) / total
    entries = [(tid, w * scale) for tid, w in zip(ids, weights)]
    if config.eos_prob > 0.0:
        entries.append((config.n_words, config.eos_prob))
    vocab_size = config.n_words + 1
    return quantize(validate_distribution(entries, vocab_size, dense=True))


class SyntheticSession(ModelSession):
    def __init__(self, args: str, conditioning: bytes = b"",
                 max_len: int = DEFAULT_MAX_LEN):
        self.config = SyntheticConfig.parse(args)
        self.conditioning = conditioning
        tokens = tuple(f"w{i:03d}" for i in range(self.config.n_words)) + ("<eos>",)
        super().__init__(Vocabulary(tokens, eos_id=self.config.n_words), max_len=max_len)

    def _distribution(self, last_token: TokenId | None) -> NextTokenDistribution:
        return _synthetic_dist(self.config, self.conditioning, tuple(self.context))
