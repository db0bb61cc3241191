"""Protocol loop: one JSON object per line on stdin/stdout.

    out  {"type": "hello", "vocab_size": N, "eos_id": 0, "proto": 1}
    in   {"type": "reset", "conditioning": "<base64>"}
    in   {"type": "step", "last_token": t | null}
    out  {"type": "dist", "entries": [[id, prob], ...]}
    in   {"type": "close"}

Every reply is flushed immediately. With --record the session is also
dumped as a replay file (header line plus one line per step) that the codec
side can feed back for conformance checks.
"""

from __future__ import annotations

import base64
import json
import sys
from typing import TextIO

from .model import AdapterConfig, TinyCaptionLM, floored_top_entries

PROTO_VERSION = 1


class ReplayRecorder:
    def __init__(self, path: str, vocab_size: int, eos_id: int):
        self._path = path
        self._header = json.dumps(
            {"vocab": [f"tok{i}" for i in range(vocab_size)], "eos_id": eos_id}
        )
        self._handle: TextIO | None = None
        self._step = 0

    def reset(self) -> None:
        if self._handle:
            self._handle.close()
        self._handle = open(self._path, "w")
        self._handle.write(self._header + "\n")
        self._step = 0

    def record(self, entries: list[tuple[int, float]]) -> None:
        if self._handle is None:
            self.reset()
        self._handle.write(json.dumps(
            {"step": self._step, "entries": [[t, p] for t, p in entries]}
        ) + "\n")
        self._handle.flush()
        self._step += 1

    def close(self) -> None:
        if self._handle:
            self._handle.close()
            self._handle = None


def serve(config: AdapterConfig, record_path: str | None = None,
          stdin: TextIO = sys.stdin, stdout: TextIO = sys.stdout) -> int:
    model = TinyCaptionLM(config)
    recorder = ReplayRecorder(record_path, config.vocab_size, model.EOS_ID) \
        if record_path else None

    def emit(message: dict) -> None:
        stdout.write(json.dumps(message) + "\n")
        stdout.flush()

    emit({"type": "hello", "vocab_size": config.vocab_size,
          "eos_id": model.EOS_ID, "proto": PROTO_VERSION})

    prefix = model.prefix_for(b"")
    context: list[int] = []
    for line in stdin:
        if not line.strip():
            continue
        try:
            message = json.loads(line)
            kind = message["type"]
        except (ValueError, KeyError, TypeError) as exc:
            print(f"adapter: malformed input line: {exc}", file=sys.stderr)
            return 2
        if kind == "reset":
            try:
                conditioning = base64.b64decode(message["conditioning"])
            except (KeyError, TypeError, ValueError) as exc:
                print(f"adapter: bad reset: {exc}", file=sys.stderr)
                return 2
            prefix = model.prefix_for(conditioning)
            context = []
            if recorder:
                recorder.reset()
        elif kind == "step":
            last = message.get("last_token")
            if last is not None:
                if not isinstance(last, int) or not 0 <= last < config.vocab_size:
                    print(f"adapter: last_token {last!r} out of range",
                          file=sys.stderr)
                    return 2
                context.append(last)
            try:
                logits = model.next_token_logits(prefix, context)
            except ValueError as exc:
                print(f"adapter: {exc}", file=sys.stderr)
                return 2
            entries = floored_top_entries(logits, config.top_n)
            if recorder:
                recorder.record(entries)
            emit({"type": "dist", "entries": [[t, p] for t, p in entries]})
        elif kind == "close":
            break
        else:
            print(f"adapter: unknown message type {kind!r}", file=sys.stderr)
            return 2
    if recorder:
        recorder.close()
    return 0
