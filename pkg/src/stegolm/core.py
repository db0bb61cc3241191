"""Vocabulary and next-token distribution types shared by all modules.

Conventions fixed here and relied on everywhere else:

* distributions are sorted by descending probability, ties broken by
  ascending token id;
* probabilities are quantized to six decimal digits (half-even) before any
  pooling or coding, so that the sender's and receiver's arithmetic agree
  bit for bit;
* quantized entries that round to zero are dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    DuplicateTokenError,
    IdOutOfRangeError,
    MassOutOfBoundsError,
    NegativeProbabilityError,
)

TokenId = int

QUANT_DIGITS = 6
MASS_TOLERANCE = 1e-6


@dataclass(frozen=True)
class Vocabulary:
    """Ordered token strings plus an optional end-of-sequence id."""

    tokens: tuple[str, ...]
    eos_id: TokenId | None = None

    def __post_init__(self) -> None:
        if not self.tokens:
            raise ValueError("vocabulary must be nonempty")
        if len(set(self.tokens)) != len(self.tokens):
            raise ValueError("vocabulary tokens must be unique")
        if self.eos_id is not None and not 0 <= self.eos_id < len(self.tokens):
            raise ValueError(f"eos_id {self.eos_id} out of range")

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class NextTokenDistribution:
    """Probabilities over the vocabulary at one generation step.

    May be sparse: omitted ids carry probability zero. Construct through
    :func:`validate_distribution`, which canonicalizes ordering.
    """

    entries: tuple[tuple[TokenId, float], ...]
    _by_id: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_by_id", dict(self.entries))

    def __len__(self) -> int:
        return len(self.entries)

    def prob_of(self, token: TokenId) -> float:
        """Probability of `token`, zero if absent."""
        return self._by_id.get(token, 0.0)

    @property
    def support(self) -> tuple[tuple[TokenId, float], ...]:
        """Entries with strictly positive probability."""
        return tuple((t, p) for t, p in self.entries if p > 0.0)


def _canonical_sort(entries: list[tuple[TokenId, float]]) -> list[tuple[TokenId, float]]:
    # descending probability, ties by ascending id
    return sorted(entries, key=lambda e: (-e[1], e[0]))


def validate_distribution(
    raw: list[tuple[TokenId, float]] | tuple[tuple[TokenId, float], ...],
    vocab_size: int,
    dense: bool = True,
) -> NextTokenDistribution:
    """Check and canonicalize one step's raw (id, probability) pairs.

    Dense sources must sum to 1 within ``MASS_TOLERANCE``; sparse sources
    (top-N truncations) only need total mass <= 1 + tolerance.
    """
    if not raw:
        raise ValueError("raw distribution must be nonempty")
    seen: set[TokenId] = set()
    total = 0.0
    for token, prob in raw:
        if prob < 0.0:
            raise NegativeProbabilityError(f"token {token} has probability {prob}")
        if token in seen:
            raise DuplicateTokenError(f"token {token} appears twice")
        if not 0 <= token < vocab_size:
            raise IdOutOfRangeError(f"token {token} outside vocabulary of {vocab_size}")
        seen.add(token)
        total += prob
    if total > 1.0 + MASS_TOLERANCE:
        raise MassOutOfBoundsError(f"total mass {total} exceeds 1")
    if dense and total < 1.0 - MASS_TOLERANCE:
        raise MassOutOfBoundsError(f"total mass {total} below 1 for dense source")
    return NextTokenDistribution(tuple(_canonical_sort(list(raw))))


def quantize(dist: NextTokenDistribution) -> NextTokenDistribution:
    """Round every probability half-even to six digits, drop zeros, re-sort.

    Idempotent; gives the sender and receiver identical numbers even when
    their raw model outputs differ in the last float bits.
    """
    rounded = [(t, round(p, QUANT_DIGITS)) for t, p in dist.entries]
    kept = [(t, p) for t, p in rounded if p > 0.0]
    return NextTokenDistribution(tuple(_canonical_sort(kept)))


def drop_token(dist: NextTokenDistribution, token: TokenId) -> NextTokenDistribution:
    """Distribution with `token` removed; order of the rest is preserved."""
    return NextTokenDistribution(tuple(e for e in dist.entries if e[0] != token))
