"""Information hiding and extraction.

Hiding walks the model one step at a time: build the candidate pool, give
each pool token a canonical Huffman codeword, and emit the token whose
codeword prefixes the remaining framed message. While framed bits remain the
EOS token is suppressed (under the default policy) so generation cannot stop
early; once the message is consumed, generation continues by argmax until
EOS or the length cap, which keeps the tail deterministic.

Extraction replays the token sequence against the same backend, rebuilds the
identical pools and codes, and accumulates each token's codeword until the
framing completes; the argmax tail is never inspected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .coding import BitMessage, build_canonical_huffman, decode_step, deframe, embed_step, frame
from .core import NextTokenDistribution, TokenId
from .errors import CapacityExceededError, IncompleteMessageError
from .models import ModelSession
from .pooling import CandidatePool, EosPolicy, PoolParams, TopKParams, semantic_pool, topk_pool


@dataclass(frozen=True)
class StegoParams:
    """Everything sender and receiver must share besides the backend."""

    pool: PoolParams | TopKParams
    max_len: int = 64

    def __post_init__(self) -> None:
        if self.max_len < 1:
            raise ValueError("max_len must be >= 1")


@dataclass(frozen=True)
class StepRecord:
    pool_size: int
    bits_consumed: int
    codeword: str


@dataclass(frozen=True)
class StegoOutput:
    """Emitted tokens plus per-step embedding records.

    `steps` covers embedding steps only; the argmax tail carries no bits.
    gross_bits counts framed bits consumed including the zero padding that
    completes the final codeword, so gross_bits >= 32 + payload_bits.
    """

    tokens: tuple[TokenId, ...]
    steps: tuple[StepRecord, ...] = field(repr=False)
    gross_bits: int
    payload_bits: int

    @property
    def embed_token_count(self) -> int:
        return len(self.steps)


def _build_pool(dist: NextTokenDistribution, params: PoolParams | TopKParams,
                suppress_eos: bool, eos_id: TokenId | None) -> CandidatePool:
    if isinstance(params, TopKParams):
        from .core import drop_token

        if suppress_eos and eos_id is not None:
            dist = drop_token(dist, eos_id)
        return topk_pool(dist, params.k)
    return semantic_pool(dist, params, suppress_eos=suppress_eos, eos_id=eos_id)


def hide(session: ModelSession, payload: BitMessage, params: StegoParams) -> StegoOutput:
    """Embed the framed payload into a fresh session's generation."""
    if session.step != 0:
        raise ValueError("hide requires a fresh session")
    stream = frame(payload)
    eos_id = session.eos_id
    suppress = params.pool.eos_policy is EosPolicy.SUPPRESS and eos_id is not None

    tokens: list[TokenId] = []
    steps: list[StepRecord] = []
    last: TokenId | None = None
    ended_at_eos = False

    while not stream.exhausted:
        if len(tokens) >= params.max_len:
            raise CapacityExceededError(
                f"{len(stream) - stream.cursor} framed bits left at max_len {params.max_len}"
            )
        dist = session.next_distribution(last)
        pool = _build_pool(dist, params.pool, suppress, eos_id)
        code = build_canonical_huffman(pool)
        token, consumed = embed_step(code, stream)
        tokens.append(token)
        steps.append(StepRecord(len(pool), consumed, code.codewords[token]))
        if token == eos_id:
            # only reachable under the strict policy
            if not stream.exhausted:
                raise CapacityExceededError("EOS selected with framed bits remaining")
            ended_at_eos = True
            break
        last = token

    while not ended_at_eos and len(tokens) < params.max_len:
        dist = session.next_distribution(last)
        top = dist.entries[0][0]
        if top == eos_id:
            break
        tokens.append(top)
        last = top

    return StegoOutput(
        tokens=tuple(tokens),
        steps=tuple(steps),
        gross_bits=stream.cursor,
        payload_bits=payload.length_bits,
    )


def extract(session: ModelSession, tokens: list[TokenId] | tuple[TokenId, ...],
            params: StegoParams) -> BitMessage:
    """Recover the payload from a token sequence.

    The session must match the sender's backend, conditioning, and params;
    any mismatch surfaces as TokenNotInPoolError, IncompleteMessageError, or
    a wrong payload, never as a silent partial success.
    """
    if session.step != 0:
        raise ValueError("extract requires a fresh session")
    eos_id = session.eos_id
    suppress = params.pool.eos_policy is EosPolicy.SUPPRESS and eos_id is not None

    accumulated = ""
    last: TokenId | None = None
    for token in tokens:
        payload = deframe(accumulated)
        if payload is not None:
            return payload
        dist = session.next_distribution(last)
        pool = _build_pool(dist, params.pool, suppress, eos_id)
        code = build_canonical_huffman(pool)
        accumulated += decode_step(code, token)
        last = token

    payload = deframe(accumulated)
    if payload is not None:
        return payload
    raise IncompleteMessageError(
        f"tokens exhausted with {len(accumulated)} framed bits accumulated"
    )
