from __future__ import annotations

import json
import logging
from pathlib import Path

from pydantic import ValidationError

from app.models.circuit import Circuit, Gate, GateKind
from app.schemas.api import GateDocument, NetlistDocument
from app.services.circuits import build_circuit
from app.services.errors import NetlistError

logger = logging.getLogger(__name__)

NETLIST_SUFFIXES = (".net", ".json")


def _int_token(token: str, line: int, column: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise NetlistError(f"expected an integer, got {token!r}", line, column) from None


def _columns(raw: str) -> list[tuple[str, int]]:
    tokens: list[tuple[str, int]] = []
    position = 0
    for token in raw.split():
        position = raw.index(token, position)
        tokens.append((token, position + 1))
        position += len(token)
    return tokens


def _parse_text(text: str) -> tuple[str, list[Gate], list[int]]:
    name = "circuit"
    gates: list[Gate] = []
    outputs: list[int] | None = None
    for line_no, raw in enumerate(text.splitlines(), start=1):
        raw = raw.split("#", 1)[0]
        tokens = _columns(raw)
        if not tokens:
            continue
        keyword, column = tokens[0]
        if keyword == "circuit":
            if len(tokens) != 2:
                raise NetlistError("usage: circuit <name>", line_no, column)
            name = tokens[1][0]
        elif keyword == "gate":
            if len(tokens) < 3:
                raise NetlistError("usage: gate <id> <KIND> [input ids...]", line_no, column)
            gate_id = _int_token(tokens[1][0], line_no, tokens[1][1])
            kind_token, kind_column = tokens[2]
            try:
                kind = GateKind(kind_token.upper())
            except ValueError:
                raise NetlistError(f"unknown gate kind {kind_token!r}", line_no, kind_column) from None
            inputs = tuple(_int_token(token, line_no, col) for token, col in tokens[3:])
            gates.append(Gate(gate_id, kind, inputs))
        elif keyword == "outputs":
            if outputs is not None:
                raise NetlistError("outputs declared twice", line_no, column)
            outputs = [_int_token(token, line_no, col) for token, col in tokens[1:]]
        else:
            raise NetlistError(f"unknown directive {keyword!r}", line_no, column)
    if outputs is None:
        raise NetlistError("missing outputs line")
    return name, gates, outputs


def _parse_json(text: str) -> tuple[str, list[Gate], list[int]]:
    try:
        document = NetlistDocument.model_validate_json(text)
    except ValidationError as exc:
        raise NetlistError(f"invalid JSON netlist: {exc.errors()[0]['msg']}") from exc
    gates = [Gate(gate.id, gate.kind, tuple(gate.inputs)) for gate in document.gates]
    return document.name, gates, list(document.outputs)


def parse_circuit(text: str, name: str | None = None) -> Circuit:
    """Parse a text or JSON netlist; the form is picked by the first non-blank character."""
    if text.lstrip().startswith("{"):
        parsed_name, gates, outputs = _parse_json(text)
    else:
        parsed_name, gates, outputs = _parse_text(text)
    return build_circuit(name or parsed_name, gates, outputs)


def load_circuit(path: str | Path) -> Circuit:
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    circuit = parse_circuit(text)
    logger.debug("loaded circuit", extra={"path": str(path), "circuit": circuit.name})
    return circuit


def format_netlist(circuit: Circuit) -> str:
    lines = [f"circuit {circuit.name}"]
    for gate in circuit.gates:
        lines.append(" ".join(["gate", str(gate.id), gate.kind.value, *map(str, gate.inputs)]))
    lines.append("outputs " + " ".join(map(str, circuit.outputs)))
    return "\n".join(lines) + "\n"


def netlist_document(circuit: Circuit) -> NetlistDocument:
    return NetlistDocument(
        name=circuit.name,
        gates=[GateDocument(id=g.id, kind=g.kind, inputs=list(g.inputs)) for g in circuit.gates],
        outputs=list(circuit.outputs),
    )


def format_netlist_json(circuit: Circuit) -> str:
    return json.dumps(netlist_document(circuit).model_dump(mode="json"), indent=2) + "\n"


def netlist_paths(paths: list[str | Path]) -> list[Path]:
    """Expand directories into the netlist files they contain, sorted by name."""
    found: list[Path] = []
    for entry in map(Path, paths):
        if entry.is_dir():
            found.extend(sorted(p for p in entry.iterdir() if p.suffix in NETLIST_SUFFIXES))
        else:
            found.append(entry)
    return found
