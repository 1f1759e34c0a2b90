import pytest

from app.models.circuit import GateKind
from app.services.circuits import stats
from app.services.errors import CircuitValidationError, NetlistError
from app.services.netlist import (
    format_netlist,
    format_netlist_json,
    netlist_paths,
    parse_circuit,
)


def test_text_netlist_parses_into_leveled_circuit():
    circuit = parse_circuit(
        """
        circuit tiny   # trailing comment
        gate 1 INPUT
        gate 2 input
        gate 3 AND 1 2
        outputs 3
        """
    )
    assert circuit.name == "tiny"
    assert circuit.gate(2).kind is GateKind.INPUT
    assert circuit.levels == {1: 0, 2: 0, 3: 1}
    shape = stats(circuit)
    assert (shape.G, shape.D, shape.inputs, shape.outputs) == (1, 1, 2, 1)


def test_wire_indices_follow_sorted_producer_consumer_slot(formula):
    indices = {(w.producer, w.consumer, w.slot): w.index for w in formula.wires}
    assert indices == {
        (1, 5, 0): 1,
        (2, 5, 1): 2,
        (3, 6, 0): 3,
        (4, 6, 1): 4,
        (5, 7, 0): 5,
        (6, 7, 1): 6,
        (7, 0, 0): 7,
    }
    assert formula.output_wire(0).index == 7


def test_syntax_error_reports_line_and_column():
    with pytest.raises(NetlistError) as exc:
        parse_circuit("gate 1 INPUT\ngate x AND 1\noutputs 1\n")
    assert exc.value.line == 2
    assert exc.value.column == 6
    assert "line 2, column 6" in str(exc.value)


def test_unknown_kind_and_directive_are_rejected():
    with pytest.raises(NetlistError, match="unknown gate kind"):
        parse_circuit("gate 1 INPUT\ngate 2 XOR 1\noutputs 2\n")
    with pytest.raises(NetlistError, match="unknown directive"):
        parse_circuit("wire 1 2\n")
    with pytest.raises(NetlistError, match="missing outputs"):
        parse_circuit("gate 1 INPUT\n")


@pytest.mark.parametrize(
    ("text", "message"),
    [
        ("gate 1 INPUT\ngate 2 NOT 1 1\noutputs 2\n", "NOT gate 2"),
        ("gate 1 INPUT 3\noutputs 1\n", "cannot have inputs"),
        ("gate 1 INPUT\ngate 2 AND 1 9\noutputs 2\n", "unknown gate 9"),
        ("gate 1 INPUT\ngate 2 AND 1\noutputs\n", "no outputs"),
        ("gate 1 INPUT\ngate 2 AND 1\noutputs 2 2\n", "more than once"),
        ("gate 1 INPUT\ngate 1 NOT 1\noutputs 1\n", "duplicate gate id"),
        ("gate 1 INPUT\ngate 2 AND 1 3\ngate 3 OR 2\noutputs 3\n", "cycle detected"),
        ("gate 1 INPUT\ngate 2 INPUT\ngate 3 NOT 1\noutputs 3\n", "do not reach"),
        ("gate 1 INPUT\ngate 2 AND\noutputs 2\n", "fan-in >= 1"),
    ],
)
def test_invalid_circuits_are_rejected(text, message):
    with pytest.raises(CircuitValidationError, match=message):
        parse_circuit(text)


def test_json_and_text_forms_are_interchangeable(formula):
    again = parse_circuit(format_netlist_json(formula))
    assert again.gates == formula.gates
    assert again.outputs == formula.outputs
    assert again.wires == formula.wires
    assert parse_circuit(format_netlist(formula)).gates == formula.gates


def test_json_netlist_errors_are_netlist_errors():
    with pytest.raises(NetlistError, match="invalid JSON"):
        parse_circuit('{"gates": [{"id": 1, "kind": "XOR"}], "outputs": [1]}')


def test_constants_are_sources():
    circuit = parse_circuit("gate 1 CONST_ONE\ngate 2 INPUT\ngate 3 AND 1 2\noutputs 3\n")
    assert circuit.levels[1] == 0
    assert [g.id for g in circuit.input_gates] == [2]


def test_netlist_paths_expands_directories(samples_dir):
    found = netlist_paths([samples_dir])
    assert [p.name for p in found] == sorted(p.name for p in found)
    assert any(p.suffix == ".json" for p in found)
    assert len(found) == 6
