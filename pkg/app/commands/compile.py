from __future__ import annotations

import argparse
import json
from pathlib import Path

from app.commands.utils import EXIT_OK, emit, emit_json, read_text
from app.models.program import Backend
from app.services.compilers import compile_circuit
from app.services.netlist import parse_circuit
from app.services.programs import format_program, format_report, format_report_json, report_model


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("compile", help="lower a netlist into a step CRN program")
    parser.add_argument("circuit", help="netlist file (text or JSON)")
    parser.add_argument("--backend", choices=[b.value for b in Backend], default=Backend.FORMULA.value)
    parser.add_argument("--out", help="write the program here instead of standard output")
    parser.add_argument("--report", help="report path (defaults to <out>.report)")
    parser.add_argument("--json", action="store_true", help="JSON report")
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    circuit = parse_circuit(read_text(args.circuit))
    compilation = compile_circuit(circuit, args.backend)
    program_text = format_program(compilation.program)
    report = compilation.report

    if args.out:
        out = Path(args.out)
        out.write_text(program_text, encoding="utf-8")
        report_path = Path(args.report) if args.report else out.with_name(out.name + ".report")
        report_path.write_text(
            format_report_json(report) if args.json else format_report(report), encoding="utf-8"
        )
        emit(f"wrote {out} ({report.step_count} steps, {report.species_count} species)")
        return EXIT_OK

    if args.json:
        emit_json({"program": program_text, "report": json.loads(report_model(report).model_dump_json())})
    else:
        emit(program_text)
        emit(format_report(report))
    return EXIT_OK
