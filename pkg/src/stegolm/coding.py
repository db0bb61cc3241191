"""Deterministic canonical Huffman coding over candidate pools, plus message
framing.

Bit conventions, fixed once for both directions of the channel:

* bits are consumed most-significant first;
* a framed stream is a 32-bit big-endian payload length followed by the
  payload, logically extended with infinite zero padding, so the final
  codeword of a message never needs a terminator token;
* Huffman merging orders queue nodes by (weight, rank), where a leaf's rank
  is its token id and an internal node's rank is the minimum rank of its
  children; codewords are then reassigned canonically by (length, token id),
  which decouples the emitted bit patterns from the merge-tree shape.

Weights enter the merge as integer millionths of the quantized
probabilities, so tie handling never depends on float summation.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from functools import lru_cache

from .core import TokenId
from .errors import MessageTooLongError, TokenNotInPoolError
from .pooling import CandidatePool

LENGTH_HEADER_BITS = 32
MAX_PAYLOAD_BITS = 2**32


@dataclass(frozen=True)
class BitMessage:
    """A finite payload bit sequence, most significant bit first."""

    bits: str

    def __post_init__(self) -> None:
        if self.bits.strip("01") != "":
            raise ValueError("bits must contain only '0' and '1'")
        if len(self.bits) >= MAX_PAYLOAD_BITS:
            raise MessageTooLongError(f"{len(self.bits)} payload bits")

    @property
    def length_bits(self) -> int:
        return len(self.bits)

    @classmethod
    def from_hex(cls, hex_string: str) -> "BitMessage":
        if hex_string == "":
            return cls("")
        value = int(hex_string, 16)  # raises ValueError on bad digits
        return cls(format(value, f"0{4 * len(hex_string)}b"))

    def to_hex(self) -> str:
        """Hex form, big-endian, left-padded to a whole number of nibbles."""
        if not self.bits:
            return ""
        pad = (-len(self.bits)) % 4
        padded = "0" * pad + self.bits
        return format(int(padded, 2), f"0{len(padded) // 4}x")


class FramedStream:
    """Length-prefixed bit stream with a read cursor.

    Reads past the end yield zeros; ``cursor`` may therefore exceed the
    physical length, and its final value is the gross bit count consumed.
    """

    def __init__(self, bits: str):
        self.bits = bits
        self.cursor = 0

    def __len__(self) -> int:
        return len(self.bits)

    @property
    def exhausted(self) -> bool:
        return self.cursor >= len(self.bits)

    def read_bit(self) -> str:
        bit = self.bits[self.cursor] if self.cursor < len(self.bits) else "0"
        self.cursor += 1
        return bit


def frame(payload: BitMessage) -> FramedStream:
    """Prefix the payload with its 32-bit big-endian bit length."""
    if payload.length_bits >= MAX_PAYLOAD_BITS:
        raise MessageTooLongError(f"{payload.length_bits} payload bits")
    header = format(payload.length_bits, f"0{LENGTH_HEADER_BITS}b")
    return FramedStream(header + payload.bits)


def deframe(accumulated: str) -> BitMessage | None:
    """Payload once header plus payload bits have arrived, else None.

    Surplus bits past the declared length (codeword padding) are ignored.
    """
    if len(accumulated) < LENGTH_HEADER_BITS:
        return None
    length = int(accumulated[:LENGTH_HEADER_BITS], 2)
    if len(accumulated) - LENGTH_HEADER_BITS < length:
        return None
    return BitMessage(accumulated[LENGTH_HEADER_BITS:LENGTH_HEADER_BITS + length])


@dataclass(frozen=True)
class HuffmanCode:
    """Prefix-free codeword per pool token; empty codeword for a singleton."""

    codewords: dict[TokenId, str]
    _by_codeword: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "_by_codeword", {c: t for t, c in self.codewords.items()}
        )

    def __len__(self) -> int:
        return len(self.codewords)


def _micro_weight(prob: float) -> int:
    # quantized probabilities are multiples of 1e-6; clamp guards unquantized
    # stragglers so every leaf keeps positive weight
    return max(1, round(prob * 1_000_000))


def _huffman_lengths(entries: tuple[tuple[TokenId, float], ...]) -> dict[TokenId, int]:
    """Code lengths via Huffman merging with (weight, rank) tie-breaking."""
    # each heap item: (weight, rank, leaf token ids grouped by depth-so-far)
    queue: list[tuple[int, int, dict[TokenId, int]]] = [
        (_micro_weight(p), t, {t: 0}) for t, p in entries
    ]
    heapq.heapify(queue)
    while len(queue) > 1:
        w1, r1, d1 = heapq.heappop(queue)
        w2, r2, d2 = heapq.heappop(queue)
        merged = {t: d + 1 for t, d in d1.items()}
        merged.update({t: d + 1 for t, d in d2.items()})
        heapq.heappush(queue, (w1 + w2, min(r1, r2), merged))
    return queue[0][2]


@lru_cache(maxsize=8192)
def build_canonical_huffman(pool: CandidatePool) -> HuffmanCode:
    """Optimal prefix-free code over the pool, canonically assigned.

    Tokens are sorted by (code length, token id) and given lexicographically
    increasing codewords. A single-token pool gets the empty codeword.
    """
    if len(pool) == 1:
        return HuffmanCode({pool.entries[0][0]: ""})
    lengths = _huffman_lengths(pool.entries)
    ordered = sorted(lengths.items(), key=lambda kv: (kv[1], kv[0]))
    codewords: dict[TokenId, str] = {}
    code = 0
    prev_len = ordered[0][1]
    for token, length in ordered:
        code <<= length - prev_len
        codewords[token] = format(code, f"0{length}b")
        code += 1
        prev_len = length
    return HuffmanCode(codewords)


def embed_step(code: HuffmanCode, stream: FramedStream) -> tuple[TokenId, int]:
    """Select the token whose codeword prefixes the remaining stream.

    Completeness of the code guarantees exactly one match on any bit
    sequence, including the zero padding past the stream's end. Returns the
    token and the number of bits consumed (the codeword length).
    """
    by_codeword = code._by_codeword
    if len(code) == 1:
        return next(iter(code.codewords)), 0
    longest = max(len(c) for c in by_codeword)
    prefix = ""
    while prefix not in by_codeword:
        if len(prefix) >= longest:
            raise ValueError("incomplete code: no codeword matches the stream")
        prefix += stream.read_bit()
    return by_codeword[prefix], len(prefix)


def decode_step(code: HuffmanCode, token: TokenId) -> str:
    """The bits this token carried; raises if it is outside the pool."""
    try:
        return code.codewords[token]
    except KeyError:
        raise TokenNotInPoolError(
            f"token {token} not in the rebuilt pool; sender and receiver disagree"
        ) from None
