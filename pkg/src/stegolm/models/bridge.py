"""Bridge backend: drives an external model adapter over its standard
streams, one JSON object per line.

    adapter -> codec   {"type": "hello", "vocab_size": N, "eos_id": E, "proto": 1}
    codec -> adapter   {"type": "reset", "conditioning": "<base64>"}
    codec -> adapter   {"type": "step", "last_token": t}      (null at step 0)
    adapter -> codec   {"type": "dist", "entries": [[id, prob], ...]}
    codec -> adapter   {"type": "close"}

The adapter must flush after every line and emit probabilities already
rounded to six decimals, descending, at most its configured top-N.
"""

from __future__ import annotations

import base64
import json
import shlex
import subprocess

from ..core import NextTokenDistribution, TokenId, Vocabulary, quantize, validate_distribution
from ..errors import BackendUnavailableError, BridgeProtocolError, StegoError
from . import DEFAULT_MAX_LEN, ModelSession

PROTO_VERSION = 1


class BridgeSession(ModelSession):
    def __init__(self, command: str, conditioning: bytes = b"",
                 max_len: int = DEFAULT_MAX_LEN):
        if not command.strip():
            raise BackendUnavailableError("bridge backend needs a command line")
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise BackendUnavailableError(f"cannot start adapter: {exc}") from None

        hello_line = self._proc.stdout.readline()
        try:
            hello = json.loads(hello_line)
            if hello["type"] != "hello" or hello["proto"] != PROTO_VERSION:
                raise ValueError(f"unexpected handshake {hello_line!r}")
            vocab_size = int(hello["vocab_size"])
            eos_id = hello.get("eos_id")
        except (ValueError, KeyError, TypeError) as exc:
            self._terminate()
            raise BackendUnavailableError(f"handshake failed: {exc}") from None

        tokens = tuple(f"tok{i}" for i in range(vocab_size))
        super().__init__(Vocabulary(tokens, eos_id=eos_id), max_len=max_len)
        self._closed = False
        self._send({"type": "reset",
                    "conditioning": base64.b64encode(conditioning).decode("ascii")})

    def _send(self, message: dict) -> None:
        try:
            self._proc.stdin.write(json.dumps(message) + "\n")
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise BridgeProtocolError(f"adapter pipe closed: {exc}") from None

    def _distribution(self, last_token: TokenId | None) -> NextTokenDistribution:
        self._send({"type": "step", "last_token": last_token})
        line = self._proc.stdout.readline()
        if not line:
            raise BridgeProtocolError("adapter closed its output mid-session")
        try:
            message = json.loads(line)
            if message["type"] != "dist":
                raise ValueError(f"expected dist, got {message['type']!r}")
            raw = [(int(t), float(p)) for t, p in message["entries"]]
        except (ValueError, KeyError, TypeError) as exc:
            raise BridgeProtocolError(f"malformed dist line: {exc}") from None
        try:
            dist = validate_distribution(raw, len(self.vocabulary), dense=False)
        except StegoError as exc:
            raise BridgeProtocolError(f"invalid distribution from adapter: {exc}") from None
        return quantize(dist)

    def _terminate(self) -> None:
        try:
            self._proc.kill()
        except OSError:
            pass
        self._proc.wait()

    def close(self) -> None:
        if getattr(self, "_closed", True):
            return
        self._closed = True
        try:
            self._send({"type": "close"})
            self._proc.wait(timeout=5)
        except (BridgeProtocolError, subprocess.TimeoutExpired):
            self._terminate()

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass
