from __future__ import annotations

import argparse
import sys

from app.commands.utils import EXIT_COUNTEREXAMPLE, EXIT_OK, emit, emit_json, parse_bits, read_text
from app.models.program import Schedule
from app.services.engine import run_program
from app.services.programs import parse_program


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("run", help="execute a program on one input")
    parser.add_argument("program", help="program file written by 'compile'")
    parser.add_argument("bits", help="input bits in circuit input order, e.g. 1001")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--trace", action="store_true", help="print every rule application")
    parser.add_argument("--json", action="store_true")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    program = parse_program(read_text(args.program))
    result = run_program(program, parse_bits(args.bits), Schedule(args.seed), trace=args.trace)

    if args.json:
        emit_json(
            {
                "ok": result.decode_error is None,
                "outputs": None if result.decoded is None else list(result.decoded),
                "error": result.decode_error,
                "peak_volume": result.peak_volume,
                "step_count": result.step_count,
                "final": result.final.sparse(),
                "trace": list(result.trace),
            }
        )
        return EXIT_OK if result.decode_error is None else EXIT_COUNTEREXAMPLE

    for line in result.trace:
        emit(line)
    if result.decode_error is not None:
        sys.stderr.write(f"decode error: {result.decode_error}\n")
        emit(f"final: {result.final}")
        return EXIT_COUNTEREXAMPLE
    emit("output: " + " ".join(map(str, result.decoded or ())))
    emit(f"peak_volume: {result.peak_volume}")
    emit(f"steps: {result.step_count}")
    return EXIT_OK
