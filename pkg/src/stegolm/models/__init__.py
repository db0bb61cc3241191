"""Deterministic next-token-distribution sources.

A backend is addressed by a spec string:

* ``toy``                                    trigram model over the bundled
                                             caption corpus; the conditioning
                                             bytes name a topic
* ``synthetic:seed=7,shape=zipf-16``         seeded hash-keyed distributions
* ``replay:path/to/file.jsonl``              pre-recorded distributions
* ``bridge:<command line>``                  external adapter subprocess

Determinism is a hard contract: identical (backend config, conditioning,
context) must yield identical quantized distributions, because extraction
re-derives every candidate pool on the receiving side.
"""

from __future__ import annotations

from abc import ABC, abstractmethod

from ..core import NextTokenDistribution, TokenId, Vocabulary
from ..errors import StepLimitExceededError, UnknownBackendError

DEFAULT_MAX_LEN = 64


class ModelSession(ABC):
    """One generation thread: vocabulary, emitted context, step counter."""

    def __init__(self, vocabulary: Vocabulary, max_len: int = DEFAULT_MAX_LEN):
        self.vocabulary = vocabulary
        self.max_len = max_len
        self.context: list[TokenId] = []
        self._step = 0

    @property
    def eos_id(self) -> TokenId | None:
        return self.vocabulary.eos_id

    @property
    def step(self) -> int:
        return self._step

    def next_distribution(self, last_token: TokenId | None = None) -> NextTokenDistribution:
        """Record `last_token` and return the quantized distribution for the
        next position. `last_token` must be None exactly at step 0."""
        if self._step == 0:
            if last_token is not None:
                raise ValueError("step 0 takes no last_token")
        elif last_token is None:
            raise ValueError("last_token required after step 0")
        if last_token is not None:
            if not 0 <= last_token < len(self.vocabulary):
                raise ValueError(f"last_token {last_token} outside vocabulary")
            if len(self.context) >= self.max_len:
                raise StepLimitExceededError(f"context already at max_len {self.max_len}")
            self.context.append(last_token)
        self._step += 1
        return self._distribution(last_token)

    @abstractmethod
    def _distribution(self, last_token: TokenId | None) -> NextTokenDistribution:
        """Backend-specific computation; context bookkeeping already done."""

    def close(self) -> None:
        pass

    def __enter__(self) -> "ModelSession":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def open_session(backend_spec: str, conditioning: bytes = b"",
                 max_len: int = DEFAULT_MAX_LEN) -> ModelSession:
    """Open a fresh session (step 0, empty context) on the named backend."""
    name, _, rest = backend_spec.partition(":")
    if name == "toy":
        from .toy import ToySession
        return ToySession(conditioning, max_len=max_len)
    if name == "synthetic":
        from .synthetic import SyntheticSession
        return SyntheticSession(rest, conditioning, max_len=max_len)
    if name == "replay":
        from .replay import ReplaySession
        return ReplaySession(rest, max_len=max_len)
    if name == "bridge":
        from .bridge import BridgeSession
        return BridgeSession(rest, conditioning, max_len=max_len)
    raise UnknownBackendError(f"unknown backend {name!r}")
