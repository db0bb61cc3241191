"""Stego file format: everything a receiver needs to re-derive the pools.

Version-tagged JSON, written canonically (sorted keys, two-space indent) so
that test vectors are byte-stable. Unknown fields are ignored on read.

The conditioning travels inside the file purely for test convenience. In a
real deployment the cover itself is the shared conditioning and must reach
the receiver unaltered; see the README.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass
from pathlib import Path

from .core import TokenId
from .pipeline import StegoParams
from .pooling import EosPolicy, PoolParams

FORMAT_VERSION = 1


@dataclass(frozen=True)
class StegoFile:
    backend: str
    conditioning: bytes
    params: StegoParams
    token_ids: tuple[TokenId, ...]
    tokens: tuple[str, ...]  # informational only

    def to_json(self) -> str:
        pool = self.params.pool
        if not isinstance(pool, PoolParams):
            raise ValueError("stego files only carry two-threshold pool params")
        payload = {
            "format_version": FORMAT_VERSION,
            "backend": self.backend,
            "conditioning_b64": base64.b64encode(self.conditioning).decode("ascii"),
            "params": {
                "t_a": pool.t_a,
                "t_r": pool.t_r,
                "max_pool_size": pool.max_pool_size,
                "eos_policy": pool.eos_policy.value,
                "max_len": self.params.max_len,
            },
            "token_ids": list(self.token_ids),
            "tokens": list(self.tokens),
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "StegoFile":
        data = json.loads(text)
        version = data.get("format_version")
        if version != FORMAT_VERSION:
            raise ValueError(f"unsupported stego file version {version!r}")
        params = data["params"]
        pool = PoolParams(
            t_a=float(params["t_a"]),
            t_r=float(params["t_r"]),
            max_pool_size=params.get("max_pool_size"),
            eos_policy=EosPolicy(params.get("eos_policy", "suppress")),
        )
        return cls(
            backend=data["backend"],
            conditioning=base64.b64decode(data["conditioning_b64"]),
            params=StegoParams(pool=pool, max_len=int(params.get("max_len", 64))),
            token_ids=tuple(int(t) for t in data["token_ids"]),
            tokens=tuple(data.get("tokens", [])),
        )


def save_stego_file(path: str | Path, stego: StegoFile) -> None:
    Path(path).write_text(stego.to_json())


def load_stego_file(path: str | Path) -> StegoFile:
    return StegoFile.from_json(Path(path).read_text())
