"""Command-line surface: hide, extract, sweep, ppl.

Exit codes are part of the contract so shell-driven integration stays
stable: 0 success, 1 usage or bad input, 2 capacity exceeded, 3 backend
failure, 4 extraction mismatch (wrong parameters, truncated tokens, or a
scoring model that contradicts the file).
"""

from __future__ import annotations

import argparse
import sys

from .coding import BitMessage
from .errors import (
    BackendError,
    CapacityExceededError,
    IncompleteMessageError,
    MessageTooLongError,
    StegoError,
    TokenNotInPoolError,
    ZeroProbabilityTokenError,
)
from .metrics import bpw, perplexity, sweep, write_sweep_csv
from .models import open_session
from .pipeline import StegoParams, extract, hide
from .pooling import EosPolicy, PoolParams
from .stego_io import StegoFile, load_stego_file, save_stego_file

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CAPACITY = 2
EXIT_BACKEND = 3
EXIT_MISMATCH = 4


def _float_list(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad float list {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("list must be nonempty")
    return values


def _seeded_backend(spec: str, seed: int | None) -> str:
    """Inject --seed into a synthetic spec that does not name one."""
    if seed is None or not spec.startswith("synthetic") or "seed=" in spec:
        return spec
    separator = "," if ":" in spec else ":"
    return f"{spec}{separator}seed={seed}"


def cmd_hide(args: argparse.Namespace) -> int:
    payload = BitMessage.from_hex(args.msg_hex)
    backend = _seeded_backend(args.backend, args.seed)
    conditioning = args.cond.encode("utf-8")
    params = StegoParams(
        pool=PoolParams(
            t_a=args.ta,
            t_r=args.tr,
            max_pool_size=args.max_pool_size,
            eos_policy=EosPolicy(args.eos_policy),
        ),
        max_len=args.max_len,
    )
    with open_session(backend, conditioning, max_len=args.max_len) as session:
        output = hide(session, payload, params)
        token_strings = tuple(session.vocabulary.tokens[t] for t in output.tokens)
    save_stego_file(args.out, StegoFile(
        backend=backend,
        conditioning=conditioning,
        params=params,
        token_ids=output.tokens,
        tokens=token_strings,
    ))
    gross, net = bpw(output)
    print(f"tokens={len(output.tokens)} gross_bpw={gross:.6f} net_bpw={net:.6f}")
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    stego = load_stego_file(args.infile)
    with open_session(stego.backend, stego.conditioning,
                      max_len=max(stego.params.max_len, len(stego.token_ids))) as session:
        payload = extract(session, stego.token_ids, stego.params)
    print(payload.to_hex())
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    rows = sweep(
        backend_spec=_seeded_backend(args.backend, args.seed),
        t_a_list=args.ta_list,
        t_r_list=args.tr_list,
        n_samples=args.n,
        payload_len=args.payload_bits,
        seed=args.seed if args.seed is not None else 0,
        conditioning=args.cond.encode("utf-8"),
        max_len=args.max_len,
    )
    write_sweep_csv(args.out, rows)
    print(f"wrote {len(rows)} rows to {args.out}")
    return EXIT_OK


def cmd_ppl(args: argparse.Namespace) -> int:
    stego = load_stego_file(args.infile)
    with open_session(stego.backend, stego.conditioning,
                      max_len=max(stego.params.max_len, len(stego.token_ids))) as session:
        value = perplexity(session, stego.token_ids)
    print(f"{value:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stegolm",
        description="Hide and extract secret bits in model-generated text.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_hide = sub.add_parser("hide", help="embed a hex payload into generated tokens")
    p_hide.add_argument("--backend", required=True)
    p_hide.add_argument("--cond", default="", help="conditioning string (topic, key, ...)")
    p_hide.add_argument("--ta", type=float, required=True, help="absolute threshold")
    p_hide.add_argument("--tr", type=float, required=True, help="relative threshold")
    p_hide.add_argument("--msg-hex", required=True)
    p_hide.add_argument("--max-len", type=int, default=64)
    p_hide.add_argument("--max-pool-size", type=int, default=None)
    p_hide.add_argument("--eos-policy", choices=["suppress", "strict"], default="suppress")
    p_hide.add_argument("--seed", type=int, default=None,
                        help="backend seed when the spec does not name one")
    p_hide.add_argument("--out", required=True)
    p_hide.set_defaults(func=cmd_hide)

    p_extract = sub.add_parser("extract", help="recover the payload from a stego file")
    p_extract.add_argument("--in", dest="infile", required=True)
    p_extract.set_defaults(func=cmd_extract)

    p_sweep = sub.add_parser("sweep", help="bpw/ppl means over a threshold grid")
    p_sweep.add_argument("--backend", required=True)
    p_sweep.add_argument("--cond", default="")
    p_sweep.add_argument("--ta-list", type=_float_list, required=True)
    p_sweep.add_argument("--tr-list", type=_float_list, required=True)
    p_sweep.add_argument("--n", type=int, required=True)
    p_sweep.add_argument("--payload-bits", type=int, required=True)
    p_sweep.add_argument("--seed", type=int, default=0)
    p_sweep.add_argument("--max-len", type=int, default=64)
    p_sweep.add_argument("--out", required=True)
    p_sweep.set_defaults(func=cmd_sweep)

    p_ppl = sub.add_parser("ppl", help="perplexity of a stego file under its backend")
    p_ppl.add_argument("--in", dest="infile", required=True)
    p_ppl.set_defaults(func=cmd_ppl)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except CapacityExceededError as exc:
        print(f"error: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (IncompleteMessageError, TokenNotInPoolError, ZeroProbabilityTokenError) as exc:
        print(f"error: extraction mismatch: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except BackendError as exc:
        print(f"error: backend: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (MessageTooLongError, StegoError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
