from __future__ import annotations

import argparse

from app.commands.utils import EXIT_OK, emit, emit_json, parse_range
from app.schemas.api import CorpusSpec
from app.services.corpus import generate_corpus, write_corpus


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("gen-corpus", help="write random circuits as netlist files")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--count", type=int, default=10)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--depth", default="1-4")
    parser.add_argument("--gates", default="1-12")
    parser.add_argument("--fan-in", default="1-3")
    parser.add_argument("--fan-out", default="1", help="'1' generates formulas")
    parser.add_argument("--inputs", default="1-6")
    parser.add_argument("--maj-fraction", type=float, default=0.3)
    parser.add_argument("--not-fraction", type=float, default=0.15)
    parser.add_argument("--prefix", default="gen")
    parser.add_argument("--json", action="store_true")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    spec = CorpusSpec(
        count=args.count,
        seed=args.seed,
        depth=parse_range(args.depth),
        gates=parse_range(args.gates),
        fan_in=parse_range(args.fan_in),
        fan_out=parse_range(args.fan_out),
        inputs=parse_range(args.inputs),
        maj_fraction=args.maj_fraction,
        not_fraction=args.not_fraction,
        name_prefix=args.prefix,
    )
    paths = write_corpus(generate_corpus(spec), args.out)
    if args.json:
        emit_json({"count": len(paths), "files": [str(p) for p in paths]})
    else:
        for path in paths:
            emit(str(path))
    return EXIT_OK
