"""Replay backend: serves pre-recorded distributions from a line-delimited
file. Used for cross-implementation test vectors.

File format, one JSON object per line:

    {"vocab": ["a", "b", ...], "eos_id": 2}          <- header line
    {"step": 0, "entries": [[0, 0.5], [1, 0.5]]}      <- one line per step
    {"step": 1, "entries": ...}

Entries are sorted by descending probability then ascending id, and may be
sparse (total mass <= 1).
"""

from __future__ import annotations

import json
from pathlib import Path

from ..core import NextTokenDistribution, TokenId, Vocabulary, quantize, validate_distribution
from ..errors import BackendUnavailableError, ReplayExhaustedError
from . import DEFAULT_MAX_LEN, ModelSession


def load_replay(path: str | Path) -> tuple[Vocabulary, list[NextTokenDistribution]]:
    """Parse and validate a replay file."""
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise BackendUnavailableError(f"cannot read replay file {path}: {exc}") from None
    if not lines:
        raise BackendUnavailableError(f"replay file {path} is empty")
    try:
        header = json.loads(lines[0])
        vocabulary = Vocabulary(tuple(header["vocab"]), eos_id=header.get("eos_id"))
        dists = []
        for index, line in enumerate(lines[1:]):
            record = json.loads(line)
            if record.get("step") != index:
                raise ValueError(f"record {index} carries step {record.get('step')}")
            raw = [(int(t), float(p)) for t, p in record["entries"]]
            dists.append(quantize(validate_distribution(raw, len(vocabulary), dense=False)))
    except (KeyError, ValueError, TypeError) as exc:
        raise BackendUnavailableError(f"malformed replay file {path}: {exc}") from None
    return vocabulary, dists


def write_replay(path: str | Path, vocabulary: Vocabulary,
                 dists: list[NextTokenDistribution]) -> None:
    """Write a replay file in the canonical format."""
    lines = [json.dumps({"vocab": list(vocabulary.tokens), "eos_id": vocabulary.eos_id})]
    for index, dist in enumerate(dists):
        entries = [[t, p] for t, p in dist.entries]
        lines.append(json.dumps({"step": index, "entries": entries}))
    Path(path).write_text("\n".join(lines) + "\n")


class ReplaySession(ModelSession):
    def __init__(self, path: str, max_len: int = DEFAULT_MAX_LEN):
        vocabulary, self._dists = load_replay(path)
        super().__init__(vocabulary, max_len=max_len)

    def _distribution(self, last_token: TokenId | None) -> NextTokenDistribution:
        index = self._step - 1
        if index >= len(self._dists):
            raise ReplayExhaustedError(
                f"replay has {len(self._dists)} steps, step {index} requested"
            )
        return self._dists[index]
