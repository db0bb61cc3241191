import argparse
import sys

from .model import AdapterConfig
from .server import serve


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="caption-adapter",
        description="Serve a captioning LM's next-token distributions over "
                    "the line-delimited bridge protocol.",
    )
    parser.add_argument("--model", default="tiny",
                        help="model identifier, e.g. tiny:seed=9,vocab=256")
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--top-n", type=int, default=512)
    parser.add_argument("--record", default=None,
                        help="also dump the session as a replay file")
    args = parser.parse_args(argv)
    try:
        config = AdapterConfig.parse(args.model, top_n=args.top_n,
                                     device=args.device)
    except ValueError as exc:
        print(f"adapter: {exc}", file=sys.stderr)
        return 2
    return serve(config, record_path=args.record)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
