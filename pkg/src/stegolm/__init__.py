"""stegolm: generative linguistic steganography with two-threshold candidate
pooling and canonical Huffman token selection.

The hide/extract round trip is exact over any deterministic autoregressive
next-token-distribution source; see the README for the backend catalogue and
the bridge protocol for wrapping real models.
"""

from .coding import BitMessage, HuffmanCode, build_canonical_huffman, decode_step, deframe, embed_step, frame
from .core import (
    NextTokenDistribution,
    TokenId,
    Vocabulary,
    quantize,
    validate_distribution,
)
from .errors import (
    BackendError,
    BackendUnavailableError,
    BridgeProtocolError,
    CapacityExceededError,
    DuplicateTokenError,
    EmptyDistributionError,
    EmptyOutputError,
    IdOutOfRangeError,
    IncompleteMessageError,
    MassOutOfBoundsError,
    MessageTooLongError,
    NegativeProbabilityError,
    ReplayExhaustedError,
    StegoError,
    StepLimitExceededError,
    TokenNotInPoolError,
    UnknownBackendError,
    ZeroProbabilityTokenError,
)
from .metrics import SweepRow, bpw, perplexity, sweep, write_sweep_csv
from .models import ModelSession, open_session
from .pipeline import StegoOutput, StegoParams, StepRecord, extract, hide
from .pooling import CandidatePool, EosPolicy, PoolParams, TopKParams, semantic_pool, topk_pool
from .stego_io import StegoFile, load_stego_file, save_stego_file

__version__ = "0.1.0"

__all__ = [
    "BitMessage", "HuffmanCode", "build_canonical_huffman", "decode_step",
    "deframe", "embed_step", "frame",
    "NextTokenDistribution", "TokenId", "Vocabulary", "quantize",
    "validate_distribution",
    "StegoError", "BackendError", "BackendUnavailableError",
    "BridgeProtocolError", "CapacityExceededError", "DuplicateTokenError",
    "EmptyDistributionError", "EmptyOutputError", "IdOutOfRangeError",
    "IncompleteMessageError", "MassOutOfBoundsError", "MessageTooLongError",
    "NegativeProbabilityError", "ReplayExhaustedError",
    "StepLimitExceededError", "TokenNotInPoolError", "UnknownBackendError",
    "ZeroProbabilityTokenError",
    "SweepRow", "bpw", "perplexity", "sweep", "write_sweep_csv",
    "ModelSession", "open_session",
    "StegoOutput", "StegoParams", "StepRecord", "extract", "hide",
    "CandidatePool", "EosPolicy", "PoolParams", "TopKParams",
    "semantic_pool", "topk_pool",
    "StegoFile", "load_stego_file", "save_stego_file",
]
