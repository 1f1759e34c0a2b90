from __future__ import annotations

import logging
from collections import defaultdict
from collections.abc import Iterable, Mapping, Sequence

import networkx as nx

from app.models.circuit import (
    OUTPUT_CONSUMER,
    Circuit,
    CircuitStats,
    DemandMap,
    Gate,
    GateKind,
    Wire,
)
from app.services.errors import CircuitValidationError, EncodingError

logger = logging.getLogger(__name__)


def _check_arity(gate: Gate) -> None:
    fan_in = len(gate.inputs)
    if gate.kind.is_source and fan_in:
        raise CircuitValidationError(f"{gate.kind.value} gate {gate.id} cannot have inputs")
    if gate.kind is GateKind.NOT and fan_in != 1:
        raise CircuitValidationError(f"NOT gate {gate.id} needs fan-in 1, got {fan_in}")
    if gate.kind in (GateKind.AND, GateKind.OR, GateKind.MAJ) and fan_in < 1:
        raise CircuitValidationError(f"{gate.kind.value} gate {gate.id} needs fan-in >= 1")


def _graph(gates: Sequence[Gate]) -> nx.MultiDiGraph:
    graph = nx.MultiDiGraph()
    graph.add_nodes_from(gate.id for gate in gates)
    for gate in gates:
        for slot, producer in enumerate(gate.inputs):
            graph.add_edge(producer, gate.id, key=slot)
    return graph


def build_circuit(name: str, gates: Iterable[Gate], outputs: Iterable[int]) -> Circuit:
    """Validate gates/outputs and derive wires and depth levels."""
    gates = tuple(gates)
    outputs = tuple(outputs)
    by_id: dict[int, Gate] = {}
    for gate in gates:
        if gate.id < 1:
            raise CircuitValidationError(f"gate ids must be positive, got {gate.id}")
        if gate.id in by_id:
            raise CircuitValidationError(f"duplicate gate id {gate.id}")
        by_id[gate.id] = gate
        _check_arity(gate)
    for gate in gates:
        for producer in gate.inputs:
            if producer not in by_id:
                raise CircuitValidationError(f"gate {gate.id} references unknown gate {producer}")
    if not outputs:
        raise CircuitValidationError("circuit has no outputs")
    for gate_id in outputs:
        if gate_id not in by_id:
            raise CircuitValidationError(f"output references unknown gate {gate_id}")
    if len(set(outputs)) != len(outputs):
        raise CircuitValidationError("a gate is designated as output more than once")

    graph = _graph(gates)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = nx.find_cycle(graph)
        path = " -> ".join(str(edge[0]) for edge in cycle) + f" -> {cycle[0][0]}"
        raise CircuitValidationError(f"cycle detected: {path}")

    live = set(outputs)
    for gate_id in outputs:
        live |= nx.ancestors(graph, gate_id)
    dead = [gate.id for gate in gates if gate.id not in live]
    if dead:
        raise CircuitValidationError(
            "gates do not reach any output: " + ", ".join(str(gate_id) for gate_id in dead)
        )

    levels: dict[int, int] = {}
    for gate_id in nx.topological_sort(graph):
        gate = by_id[gate_id]
        levels[gate_id] = 1 + max((levels[p] for p in gate.inputs), default=-1)

    keys = [(p, gate.id, slot) for gate in gates for slot, p in enumerate(gate.inputs)]
    keys += [(gate_id, OUTPUT_CONSUMER, position) for position, gate_id in enumerate(outputs)]
    wires = tuple(
        Wire(producer, consumer, slot, index)
        for index, (producer, consumer, slot) in enumerate(sorted(keys), start=1)
    )
    fan_out: dict[int, list[Wire]] = defaultdict(list)
    fan_in: dict[int, list[Wire]] = defaultdict(list)
    for wire in wires:
        fan_out[wire.producer].append(wire)
        if not wire.is_output:
            fan_in[wire.consumer].append(wire)

    return Circuit(
        name=name,
        gates=gates,
        outputs=outputs,
        wires=wires,
        levels=levels,
        _by_id=by_id,
        _fan_out={k: tuple(v) for k, v in fan_out.items()},
        _fan_in={k: tuple(sorted(v, key=lambda w: w.slot)) for k, v in fan_in.items()},
    )


def topological_order(circuit: Circuit) -> list[Gate]:
    return sorted(circuit.gates, key=lambda gate: (circuit.levels[gate.id], gate.id))


def _bits_by_gate(circuit: Circuit, bits: Sequence[int] | Mapping[int, int]) -> dict[int, int]:
    input_ids = [gate.id for gate in circuit.input_gates]
    if isinstance(bits, Mapping):
        missing = [gate_id for gate_id in input_ids if gate_id not in bits]
        extra = [gate_id for gate_id in bits if gate_id not in set(input_ids)]
        if missing or extra:
            raise EncodingError(f"assignment mismatch: missing {missing}, extra {extra}")
        assignment = {gate_id: bits[gate_id] for gate_id in input_ids}
    else:
        if len(bits) != len(input_ids):
            raise EncodingError(f"expected {len(input_ids)} input bits, got {len(bits)}")
        assignment = dict(zip(input_ids, bits))
    for gate_id, bit in assignment.items():
        if bit not in (0, 1):
            raise EncodingError(f"input {gate_id} is not a bit: {bit!r}")
    return assignment


def majority(values: Sequence[int]) -> int:
    """Strict majority after padding even-sized inputs with one 0."""
    size = len(values) if len(values) % 2 else len(values) + 1
    return int(2 * sum(values) > size)


def gate_values(circuit: Circuit, bits: Sequence[int] | Mapping[int, int]) -> dict[int, int]:
    """Boolean value of every gate under one input assignment."""
    values = _bits_by_gate(circuit, bits)
    for gate in topological_order(circuit):
        if gate.kind is GateKind.INPUT:
            continue
        args = [values[p] for p in gate.inputs]
        if gate.kind is GateKind.CONST_ZERO:
            values[gate.id] = 0
        elif gate.kind is GateKind.CONST_ONE:
            values[gate.id] = 1
        elif gate.kind is GateKind.AND:
            values[gate.id] = int(all(args))
        elif gate.kind is GateKind.OR:
            values[gate.id] = int(any(args))
        elif gate.kind is GateKind.NOT:
            values[gate.id] = 1 - args[0]
        else:
            values[gate.id] = majority(args)
    return values


def evaluate(circuit: Circuit, bits: Sequence[int] | Mapping[int, int]) -> tuple[int, ...]:
    values = gate_values(circuit, bits)
    return tuple(values[gate_id] for gate_id in circuit.outputs)


def is_formula(circuit: Circuit) -> bool:
    return len(circuit.outputs) == 1 and all(
        len(circuit.outgoing(gate.id)) == 1 for gate in circuit.gates
    )


def stats(circuit: Circuit) -> CircuitStats:
    non_source = [gate for gate in circuit.gates if not gate.kind.is_source]
    per_level: dict[int, int] = defaultdict(int)
    for gate in non_source:
        per_level[circuit.levels[gate.id]] += 1
    return CircuitStats(
        G=len(non_source),
        D=circuit.depth,
        F_out=max((len(circuit.outgoing(gate.id)) for gate in circuit.gates), default=1),
        W=max(per_level.values(), default=0),
        inputs=len(circuit.input_gates),
        outputs=len(circuit.outputs),
        wires=len(circuit.wires),
        formula=is_formula(circuit),
    )


def wire_width(circuit: Circuit) -> int:
    """Largest number of wires leaving a single depth level."""
    per_level: dict[int, int] = defaultdict(int)
    for wire in circuit.wires:
        per_level[circuit.levels[wire.producer]] += 1
    return max(per_level.values(), default=0)


def demand_analysis(circuit: Circuit) -> DemandMap:
    demand: dict[int, int] = {}
    for gate in reversed(topological_order(circuit)):
        demand[gate.id] = sum(
            1 if wire.is_output else demand[wire.consumer] for wire in circuit.outgoing(gate.id)
        )
    return DemandMap({gate.id: demand[gate.id] for gate in circuit.gates})


def normalize_levels(circuit: Circuit) -> tuple[Circuit, int]:
    """Insert fan-in-1 OR buffers so every wire spans one level and outputs sit at the top level.

    Each producer gets at most one buffer chain, shared by all of its far consumers.
    Returns the normalized circuit and the number of buffers inserted.
    """
    depth = circuit.depth
    next_id = max(gate.id for gate in circuit.gates) + 1
    chains: dict[int, dict[int, int]] = {}
    buffers: list[Gate] = []

    for gate in sorted(circuit.gates, key=lambda g: g.id):
        start = circuit.levels[gate.id]
        targets = [
            (depth if wire.is_output else circuit.levels[wire.consumer] - 1)
            for wire in circuit.outgoing(gate.id)
        ]
        top = max(targets, default=start)
        if top <= start:
            continue
        chain = {start: gate.id}
        for level in range(start + 1, top + 1):
            buffers.append(Gate(next_id, GateKind.OR, (chain[level - 1],)))
            chain[level] = next_id
            next_id += 1
        chains[gate.id] = chain

    if not buffers:
        return circuit, 0

    def source_for(producer: int, level: int) -> int:
        chain = chains.get(producer)
        return chain[level] if chain else producer

    rewired = [
        Gate(
            gate.id,
            gate.kind,
            tuple(source_for(p, circuit.levels[gate.id] - 1) for p in gate.inputs),
        )
        for gate in circuit.gates
    ]
    outputs = [source_for(gate_id, depth) for gate_id in circuit.outputs]
    logger.debug("inserted level buffers", extra={"circuit": circuit.name, "buffers": len(buffers)})
    return build_circuit(circuit.name, rewired + buffers, outputs), len(buffers)
