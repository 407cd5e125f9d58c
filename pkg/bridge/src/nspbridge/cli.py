"""Bridge command line: serve the stdio protocol or score a request file.

    nsp-bridge serve --model <name-or-path> [--max-seq-len 512]
                     [--batch-size 16] [--device auto] [--no-deterministic]
    nsp-bridge score-file --model <name-or-path> --pairs in.jsonl --out out.jsonl

A model that cannot be loaded, or that lacks a pretrained two-class
successor head, exits nonzero before any input is read.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .bridge import BridgeConfig, ModelLoadError, NspScorer
from .protocol import score_file, serve


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--model", required=True, help="model name or local checkpoint path")
    parser.add_argument("--max-seq-len", type=int, default=512,
                        help="token budget per pair; longest-first truncation")
    parser.add_argument("--batch-size", type=int, default=16)
    parser.add_argument("--device", default="auto", help="auto | cpu | cuda[:n]")
    parser.add_argument("--no-deterministic", dest="deterministic", action="store_false",
                        help="skip deterministic-eval setup")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nsp-bridge", description=__doc__)
    parser.add_argument("--version", action="version", version=f"nsp-bridge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="serve the stdio pair-scoring protocol")
    _add_config_flags(p_serve)

    p_file = sub.add_parser("score-file", help="score a request file offline")
    _add_config_flags(p_file)
    p_file.add_argument("--pairs", required=True, help="request-format input file")
    p_file.add_argument("--out", required=True, help="response-format output file")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    config = BridgeConfig(
        model=args.model,
        max_seq_len=args.max_seq_len,
        batch_size=args.batch_size,
        device=args.device,
        deterministic=args.deterministic,
    )
    try:
        config.validate()
        scorer = NspScorer(config)
    except (ModelLoadError, ValueError) as exc:
        print(f"nsp-bridge: {exc}", file=sys.stderr)
        return 1

    if args.command == "serve":
        serve(scorer, sys.stdin, sys.stdout)
        return 0
    try:
        count = score_file(scorer, args.pairs, args.out)
    except (OSError, ValueError) as exc:
        print(f"nsp-bridge: {exc}", file=sys.stderr)
        return 1
    print(f"scored {count} pairs into {args.out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
