from __future__ import annotations

import argparse

from app.commands.utils import (
    EXIT_COUNTEREXAMPLE,
    EXIT_OK,
    UsageError,
    emit,
    emit_json,
    format_bits,
    parse_seeds,
    read_text,
)
from app.core.config import get_settings
from app.models.program import Backend
from app.schemas.api import InputMode, VerifySummary
from app.services.netlist import netlist_paths, parse_circuit
from app.services.programs import parse_program
from app.services.verification import verify_circuit


def _input_mode(text: str) -> InputMode:
    if text.lower() == "all":
        return InputMode(kind="ALL")
    kind, _, count = text.partition(":")
    if kind.lower() != "random" or not count.isdigit():
        raise UsageError(f"--inputs expects 'all' or 'random:N', got {text!r}")
    return InputMode(kind="RANDOM", count=int(count))


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", help="check compiled programs against direct evaluation")
    parser.add_argument("circuits", nargs="+", help="netlist files or directories of them")
    parser.add_argument(
        "--backend",
        action="append",
        choices=[b.value for b in Backend],
        help="repeat to check several backends (default: formula)",
    )
    parser.add_argument("--inputs", default="all", help="'all' or 'random:N'")
    parser.add_argument("--input-seed", type=int, default=0)
    parser.add_argument("--seeds", help="e.g. 0-24 or 1,5,9 (default: 0..N-1 from settings)")
    parser.add_argument("--exhaustive", action="store_true", help="also enumerate every terminal")
    parser.add_argument("--volume-cap", type=int, help="largest step-entry volume for --exhaustive")
    parser.add_argument("--program", help="verify this program file instead of compiling")
    parser.add_argument("--workers", type=int)
    parser.add_argument("--json", action="store_true")
    parser.set_defaults(handler=handle)


def _render(summary: VerifySummary) -> list[str]:
    status = "PASS" if summary.ok else "FAIL"
    lines = [
        f"{status} {summary.circuit} backend={summary.backend.value} checked={summary.checked} "
        f"passed={summary.passed} failed={summary.failed} "
        f"exhaustive={summary.exhaustive_checked} skipped={summary.exhaustive_skipped} "
        f"bounds={'ok' if summary.bounds_ok else 'violated'}"
    ]
    if summary.majority_violations:
        gates = " ".join(str(gate) for gate in summary.majority_violations)
        lines.append(f"  majority pairing left losing copies at gates: {gates}")
    example = summary.counterexample
    if example is not None:
        lines.append(
            f"  counterexample: circuit={example.circuit} input={example.bits} seed={example.seed} "
            f"expected={format_bits(example.expected)} observed={format_bits(example.observed)}"
            + (f" error={example.error}" if example.error else "")
        )
        terminal = ", ".join(f"{name}:{count}" for name, count in example.terminal.items())
        lines.append(f"  terminal: {{{terminal}}}")
    return lines


def handle(args: argparse.Namespace) -> int:
    paths = netlist_paths(args.circuits)
    if args.program and len(paths) != 1:
        raise UsageError("--program needs exactly one circuit")
    program = parse_program(read_text(args.program)) if args.program else None
    backends = [Backend(b) for b in (args.backend or [Backend.FORMULA.value])]
    seeds = parse_seeds(args.seeds) if args.seeds else list(range(get_settings().default_seed_count))
    mode = _input_mode(args.inputs)

    summaries: list[VerifySummary] = []
    for path in paths:
        circuit = parse_circuit(read_text(path))
        for backend in backends:
            summaries.append(
                verify_circuit(
                    circuit,
                    backend,
                    inputs=mode,
                    seeds=seeds,
                    exhaustive=args.exhaustive,
                    volume_cap=args.volume_cap,
                    input_seed=args.input_seed,
                    program=program,
                    workers=args.workers,
                )
            )

    ok = all(summary.ok for summary in summaries)
    if args.json:
        emit_json({"ok": ok, "results": [s.model_dump(mode="json") for s in summaries]})
    else:
        for summary in summaries:
            for line in _render(summary):
                emit(line)
        passed = sum(summary.ok for summary in summaries)
        emit(f"{passed}/{len(summaries)} passed")
    return EXIT_OK if ok else EXIT_COUNTEREXAMPLE
