from __future__ import annotations

import json
import logging
import re
from collections.abc import Iterable
from pathlib import Path

from app.models.crn import Alphabet, Configuration, RuleSpec
from app.models.program import CompilationReport, InputEncoding, OutputDecoding, StepProgram
from app.schemas.api import CompilationReportModel
from app.services.crn import bind_rules, format_rule, parse_rule
from app.services.errors import ProgramFormatError

logger = logging.getLogger(__name__)

_STEP = re.compile(r"^step\s+(\d+):(.*)$")
_SECTIONS = ("alphabet:", "rules:", "inputs:", "outputs:")


def _counts(pairs: Iterable[tuple[str, int]]) -> str:
    return ", ".join(f"{name}={count}" for name, count in pairs)


def format_program(program: StepProgram) -> str:
    lines = [f"program {program.name}", "alphabet: " + " ".join(program.alphabet.names), "rules:"]
    lines += [f"  {format_rule(rule)}" for rule in program.rules]
    for index, step in enumerate(program.steps):
        body = _counts(step.sparse().items())
        lines.append(f"step {index}: {body}".rstrip())
    lines.append("inputs:")
    for encoding in program.inputs:
        zero, one = encoding.zero, encoding.one
        lines.append(f"  {encoding.gate_id}: {zero[0]}={zero[1]} | {one[0]}={one[1]}")
    lines.append("outputs:")
    for decoding in program.outputs:
        lines.append(f"  {decoding.gate_id}: {decoding.zero} | {decoding.one}")
    return "\n".join(lines) + "\n"


def _assignment(token: str, line: int) -> tuple[str, int]:
    name, sep, count = token.strip().rpartition("=")
    if not sep or not name or not count.strip().isdigit():
        raise ProgramFormatError(f"expected <species>=<count>, got {token.strip()!r}", line)
    return name.strip(), int(count)


def _gate_id(token: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise ProgramFormatError(f"expected a gate id, got {token!r}", line) from None


def parse_program(text: str) -> StepProgram:
    """Read the text form written by ``format_program``; hand-edited files are welcome."""
    name = "program"
    names: list[str] | None = None
    rules: list[RuleSpec] = []
    steps: list[dict[str, int]] = []
    inputs: list[InputEncoding] = []
    outputs: list[OutputDecoding] = []
    section = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("program "):
            name = line.split(None, 1)[1]
            section = None
        elif line.startswith("alphabet:"):
            names = line.split(":", 1)[1].split()
            section = None
        elif line in _SECTIONS:
            section = line[:-1]
        elif match := _STEP.match(line):
            index = int(match.group(1))
            if index != len(steps):
                raise ProgramFormatError(f"expected step {len(steps)}, got step {index}", line_no)
            body = match.group(2).strip()
            step: dict[str, int] = {}
            for token in filter(None, (part.strip() for part in body.split(","))):
                species, count = _assignment(token, line_no)
                step[species] = step.get(species, 0) + count
            steps.append(step)
            section = None
        elif section == "rules":
            try:
                rules.append(parse_rule(line))
            except ValueError as exc:
                raise ProgramFormatError(str(exc), line_no) from exc
        elif section == "inputs":
            gate, _, body = line.partition(":")
            parts = body.split("|")
            if len(parts) != 2:
                raise ProgramFormatError("usage: <gate>: <species>=<n> | <species>=<n>", line_no)
            inputs.append(
                InputEncoding(
                    _gate_id(gate.strip(), line_no),
                    _assignment(parts[0], line_no),
                    _assignment(parts[1], line_no),
                )
            )
        elif section == "outputs":
            gate, _, body = line.partition(":")
            parts = [part.strip() for part in body.split("|")]
            if len(parts) != 2 or not all(parts):
                raise ProgramFormatError("usage: <gate>: <species> | <species>", line_no)
            outputs.append(OutputDecoding(_gate_id(gate.strip(), line_no), parts[0], parts[1]))
        else:
            raise ProgramFormatError(f"unexpected line {line!r}", line_no)

    if names is None:
        raise ProgramFormatError("missing alphabet line")
    try:
        alphabet = Alphabet.of(names)
    except ValueError as exc:
        raise ProgramFormatError(str(exc)) from exc
    used = [n for rule in rules for n in rule.species]
    used += [n for step in steps for n in step]
    used += [n for enc in inputs for n in (enc.zero[0], enc.one[0])]
    used += [n for dec in outputs for n in (dec.zero, dec.one)]
    unknown = sorted({n for n in used if n not in alphabet})
    if unknown:
        raise ProgramFormatError(f"species missing from the alphabet: {', '.join(unknown)}")
    return StepProgram(
        name=name,
        alphabet=alphabet,
        rules=bind_rules(alphabet, rules),
        steps=tuple(Configuration.of(alphabet, step) for step in steps),
        inputs=tuple(inputs),
        outputs=tuple(outputs),
    )


def load_program(path: str | Path) -> StepProgram:
    return parse_program(Path(path).read_text(encoding="utf-8"))


def report_model(report: CompilationReport) -> CompilationReportModel:
    return CompilationReportModel(
        backend=report.backend,
        circuit=report.circuit,
        species_count=report.species_count,
        step_count=report.step_count,
        static_volume=report.static_volume,
        gates=report.gates,
        wires=report.wires,
        depth=report.depth,
        fan_out=report.fan_out,
        width=report.width,
        wire_width=report.wire_width,
        buffers_inserted=report.buffers_inserted,
        predicted=dict(report.predicted),
        demand=dict(report.demand.items()),
        completion_step=dict(report.completion_step),
        checkpoints=list(report.checkpoints),
        within_bounds=report.within_bounds(),
    )


def format_report(report: CompilationReport) -> str:
    """Flat ``key=value`` block; nested maps are flattened with dotted keys."""
    model = report_model(report)
    lines: list[str] = []
    for key, value in model.model_dump(mode="json").items():
        if isinstance(value, dict):
            lines += [f"{key}.{inner}={item}" for inner, item in value.items()]
        elif isinstance(value, list):
            lines.append(f"{key}={','.join(map(str, value))}")
        else:
            lines.append(f"{key}={str(value).lower() if isinstance(value, bool) else value}")
    return "\n".join(lines) + "\n"


def format_report_json(report: CompilationReport) -> str:
    return json.dumps(report_model(report).model_dump(mode="json"), indent=2) + "\n"
