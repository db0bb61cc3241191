"""Candidate pool construction.

Two strategies: a two-threshold rule that admits a token only when its
probability clears both an absolute floor and a maximum gap below the step's
top probability, and the classic fixed-size top-k cut. Pools are always a
prefix of the probability-sorted distribution, which is what makes per-step
Huffman codes cheap to rebuild on the receiving side.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .core import NextTokenDistribution, TokenId
from .errors import EmptyDistributionError


class EosPolicy(enum.Enum):
    """What to do with the end-of-sequence token while message bits remain.

    SUPPRESS removes it from the pool so generation cannot stop early;
    STRICT leaves it in and lets the pipeline fail loudly if it gets picked.
    """

    SUPPRESS = "suppress"
    STRICT = "strict"


@dataclass(frozen=True)
class PoolParams:
    """Thresholds for the two-threshold pool rule.

    t_a is the absolute probability floor; t_r is the largest allowed gap
    below the step's maximum probability. max_pool_size optionally caps the
    pool after the rule is applied (unbounded by default).
    """

    t_a: float
    t_r: float
    max_pool_size: int | None = None
    eos_policy: EosPolicy = EosPolicy.SUPPRESS

    def __post_init__(self) -> None:
        if not 0.0 <= self.t_a < 1.0:
            raise ValueError(f"t_a must be in [0, 1), got {self.t_a}")
        if not 0.0 < self.t_r <= 1.0:
            raise ValueError(f"t_r must be in (0, 1], got {self.t_r}")
        if self.max_pool_size is not None and self.max_pool_size < 1:
            raise ValueError("max_pool_size must be >= 1")


@dataclass(frozen=True)
class TopKParams:
    """Fixed-size pool baseline."""

    k: int
    eos_policy: EosPolicy = EosPolicy.SUPPRESS

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")


@dataclass(frozen=True)
class CandidatePool:
    """Admissible tokens at one step, sorted by descending probability then
    ascending id. Never empty; the first entry holds the step maximum."""

    entries: tuple[tuple[TokenId, float], ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise EmptyDistributionError("candidate pool cannot be empty")

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def token_ids(self) -> tuple[TokenId, ...]:
        return tuple(t for t, _ in self.entries)


def semantic_pool(
    dist: NextTokenDistribution,
    params: PoolParams,
    suppress_eos: bool = False,
    eos_id: TokenId | None = None,
) -> CandidatePool:
    """Admit tokens with probability strictly above max(t_a, p_max - t_r).

    The step maximum p_max is taken after optional EOS removal. When no
    token clears the floor (p_max <= t_a) the argmax token alone is
    returned, so generation can always proceed; such a singleton pool
    carries zero bits.
    """
    if suppress_eos and eos_id is None:
        raise ValueError("suppress_eos requires an eos_id")

    skip = eos_id if suppress_eos else None
    p_max: float | None = None
    admitted: list[tuple[TokenId, float]] = []
    argmax_entry: tuple[TokenId, float] | None = None
    # entries are sorted, so admission is a prefix scan with early exit
    for token, prob in dist.entries:
        if token == skip:
            continue
        if p_max is None:
            if prob <= 0.0:
                break
            p_max = prob
            argmax_entry = (token, prob)
        threshold = max(params.t_a, p_max - params.t_r)
        if prob > threshold:
            admitted.append((token, prob))
        else:
            break

    if argmax_entry is None:
        raise EmptyDistributionError("no tokens left after EOS suppression")
    if not admitted:
        admitted = [argmax_entry]
    if params.max_pool_size is not None:
        admitted = admitted[: params.max_pool_size]
    return CandidatePool(tuple(admitted))


def topk_pool(dist: NextTokenDistribution, k: int) -> CandidatePool:
    """The k highest-probability tokens (fewer if the support is smaller)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    support = dist.support
    if not support:
        raise EmptyDistributionError("distribution has empty support")
    return CandidatePool(support[:k])
