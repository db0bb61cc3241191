"""Minimal protocol peer used by the bridge backend tests.

Serves deterministic distributions derived from the reset conditioning and
the running context hash. Misbehavior modes for error-path tests:

    --garbage-dist     emit a non-JSON line instead of the first dist
    --die-after N      exit silently after N step replies
    --bad-hello        emit a hello with the wrong protocol version
"""

import argparse
import hashlib
import json
import sys

VOCAB_SIZE = 16
EOS_ID = 0


def dist_line(state: bytes) -> str:
    digest = hashlib.sha256(state).digest()
    micros = [1 + digest[i] for i in range(6)]
    scale = 1_000_000 // sum(micros)
    entries = sorted(
        ((1 + digest[8 + i] % (VOCAB_SIZE - 1), micros[i] * scale) for i in range(6)),
        key=lambda e: (-e[1], e[0]),
    )
    seen = {}
    for token, micro in entries:
        seen[token] = seen.get(token, 0) + micro
    merged = sorted(seen.items(), key=lambda e: (-e[1], e[0]))
    return json.dumps(
        {"type": "dist", "entries": [[t, m / 1_000_000] for t, m in merged]}
    )


def main() -> int:
    parser = argparse.ArgumentParser()
    parser.add_argument("--garbage-dist", action="store_true")
    parser.add_argument("--die-after", type=int, default=-1)
    parser.add_argument("--bad-hello", action="store_true")
    args = parser.parse_args()

    proto = 99 if args.bad_hello else 1
    print(json.dumps({"type": "hello", "vocab_size": VOCAB_SIZE,
                      "eos_id": EOS_ID, "proto": proto}), flush=True)

    state = b""
    replies = 0
    for line in sys.stdin:
        message = json.loads(line)
        kind = message["type"]
        if kind == "reset":
            state = message["conditioning"].encode("ascii")
        elif kind == "step":
            last = message["last_token"]
            if last is not None:
                if not 0 <= last < VOCAB_SIZE:
                    print("bad token", file=sys.stderr)
                    return 2
                state += bytes([last])
            if args.die_after >= 0 and replies >= args.die_after:
                return 0
            if args.garbage_dist:
                print("not json at all", flush=True)
            else:
                print(dist_line(state), flush=True)
            replies += 1
        elif kind == "close":
            return 0
    return 0


if __name__ == "__main__":
    sys.exit(main())
