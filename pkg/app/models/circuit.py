from __future__ import annotations

from collections.abc import Iterator, Mapping
from dataclasses import dataclass, field
from enum import Enum


class GateKind(str, Enum):
    INPUT = "INPUT"
    CONST_ZERO = "CONST_ZERO"
    CONST_ONE = "CONST_ONE"
    AND = "AND"
    OR = "OR"
    NOT = "NOT"
    MAJ = "MAJ"

    @property
    def is_source(self) -> bool:
        return self in SOURCE_KINDS

    @property
    def is_constant(self) -> bool:
        return self in (GateKind.CONST_ZERO, GateKind.CONST_ONE)


SOURCE_KINDS = frozenset({GateKind.INPUT, GateKind.CONST_ZERO, GateKind.CONST_ONE})

# consumer id used for wires that carry an output designation
OUTPUT_CONSUMER = 0


@dataclass(frozen=True)
class Gate:
    id: int
    kind: GateKind
    inputs: tuple[int, ...] = ()


@dataclass(frozen=True, order=True)
class Wire:
    """Producer-to-consumer connection; ``consumer == 0`` marks an output designation."""

    producer: int
    consumer: int
    slot: int
    index: int = field(default=0, compare=False)

    @property
    def is_output(self) -> bool:
        return self.consumer == OUTPUT_CONSUMER


@dataclass(frozen=True)
class Circuit:
    """A validated threshold circuit.

    Instances come from ``app.services.circuits.build_circuit``; the wire list and
    the per-gate depth levels are derived there and never change afterwards.
    """

    name: str
    gates: tuple[Gate, ...]
    outputs: tuple[int, ...]
    wires: tuple[Wire, ...]
    levels: Mapping[int, int]
    _by_id: Mapping[int, Gate] = field(repr=False, compare=False)
    _fan_out: Mapping[int, tuple[Wire, ...]] = field(repr=False, compare=False)
    _fan_in: Mapping[int, tuple[Wire, ...]] = field(repr=False, compare=False)

    def gate(self, gate_id: int) -> Gate:
        return self._by_id[gate_id]

    def __contains__(self, gate_id: object) -> bool:
        return gate_id in self._by_id

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def outgoing(self, gate_id: int) -> tuple[Wire, ...]:
        return self._fan_out.get(gate_id, ())

    def incoming(self, gate_id: int) -> tuple[Wire, ...]:
        """Incoming wires in slot order."""
        return self._fan_in.get(gate_id, ())

    @property
    def input_gates(self) -> tuple[Gate, ...]:
        return tuple(gate for gate in self.gates if gate.kind is GateKind.INPUT)

    @property
    def depth(self) -> int:
        return max(self.levels.values(), default=0)

    def at_level(self, level: int) -> tuple[Gate, ...]:
        return tuple(gate for gate in self.gates if self.levels[gate.id] == level)

    def output_wire(self, position: int) -> Wire:
        gate_id = self.outputs[position]
        for wire in self.outgoing(gate_id):
            if wire.is_output and wire.slot == position:
                return wire
        raise KeyError(position)


@dataclass(frozen=True)
class CircuitStats:
    G: int
    D: int
    F_out: int
    W: int
    inputs: int
    outputs: int
    wires: int
    formula: bool


@dataclass(frozen=True)
class DemandMap:
    demand: Mapping[int, int]

    def __getitem__(self, gate_id: int) -> int:
        return self.demand[gate_id]

    def __iter__(self) -> Iterator[int]:
        return iter(self.demand)

    def __len__(self) -> int:
        return len(self.demand)

    def items(self):
        return self.demand.items()

    @property
    def max_demand(self) -> int:
        return max(self.demand.values(), default=0)
