from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from app.models.circuit import Circuit, Gate, GateKind
from app.schemas.api import CorpusSpec
from app.services.circuits import build_circuit, stats
from app.services.errors import CircuitValidationError, CorpusSpecError
from app.services.netlist import format_netlist

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 500


def validate_spec(spec: CorpusSpec) -> None:
    for label in ("depth", "gates", "fan_in", "fan_out", "inputs"):
        low, high = getattr(spec, label)
        if low < 1 or low > high:
            raise CorpusSpecError(f"{label} range [{low}, {high}] is empty or not positive")
    if spec.depth[0] > spec.gates[1]:
        raise CorpusSpecError("depth range needs more gates than the gate range allows")
    if not 0 <= spec.maj_fraction <= 1 or not 0 <= spec.not_fraction <= 1:
        raise CorpusSpecError("gate fractions must lie in [0, 1]")
    if spec.maj_fraction + spec.not_fraction > 1:
        raise CorpusSpecError("maj_fraction + not_fraction must not exceed 1")
    if spec.count < 0:
        raise CorpusSpecError("count must be non-negative")


def _between(rng: np.random.Generator, bounds: tuple[int, int]) -> int:
    return int(rng.integers(bounds[0], bounds[1] + 1))


def _kind(rng: np.random.Generator, spec: CorpusSpec) -> GateKind:
    draw = rng.random()
    if draw < spec.maj_fraction:
        return GateKind.MAJ
    if draw < spec.maj_fraction + spec.not_fraction:
        return GateKind.NOT
    return GateKind.AND if rng.random() < 0.5 else GateKind.OR


class _FormulaBuilder:
    """Top-down growth: a spine guarantees the depth, side branches draw random heights."""

    def __init__(self, rng: np.random.Generator, spec: CorpusSpec, gate_target: int):
        self.rng = rng
        self.spec = spec
        self.gate_target = gate_target
        self.gates: list[tuple[int, GateKind, list[int]]] = []
        self.leaves: list[int] = []
        # leaves promised to subtrees that are not grown yet
        self.reserved = 1
        self.next_id = 1

    def _id(self) -> int:
        self.next_id += 1
        return self.next_id - 1

    def grow(self, level: int) -> int:
        if level == 0:
            leaf = self._id()
            self.leaves.append(leaf)
            self.reserved -= 1
            return leaf
        gate_id = self._id()
        kind = _kind(self.rng, self.spec)
        fan_in = 1
        if kind is not GateKind.NOT:
            room = self.spec.inputs[1] - len(self.leaves) - self.reserved
            fan_in = max(self.spec.fan_in[0], min(_between(self.rng, self.spec.fan_in), 1 + room))
        self.reserved += fan_in - 1
        children: list[int] = []
        self.gates.append((gate_id, kind, children))
        for slot in range(fan_in):
            if slot == 0:
                child_level = level - 1
            else:
                spare = self.gate_target - len(self.gates)
                child_level = int(self.rng.integers(0, min(level - 1, spare) + 1)) if spare > 0 else 0
            children.append(self.grow(child_level))
        return gate_id

    def circuit(self, name: str) -> Circuit:
        # renumber so inputs come first in leaf order, gates after in creation order
        ids = {leaf: i for i, leaf in enumerate(self.leaves, start=1)}
        for gate_id, _, _ in self.gates:
            ids[gate_id] = len(ids) + 1
        gates = [Gate(ids[leaf], GateKind.INPUT) for leaf in self.leaves]
        gates += [Gate(ids[g], kind, tuple(ids[i] for i in inputs)) for g, kind, inputs in self.gates]
        return build_circuit(name, gates, [ids[self.gates[0][0]]])


def _formula(rng: np.random.Generator, spec: CorpusSpec, name: str) -> Circuit:
    depth = _between(rng, spec.depth)
    target = max(depth, _between(rng, spec.gates))
    builder = _FormulaBuilder(rng, spec, target)
    builder.grow(depth)
    return builder.circuit(name)


def _dag(rng: np.random.Generator, spec: CorpusSpec, name: str) -> Circuit:
    depth = _between(rng, spec.depth)
    total = max(depth, _between(rng, spec.gates))
    n_inputs = _between(rng, spec.inputs)
    per_level = [1] * depth
    for level in rng.integers(0, depth, size=total - depth):
        per_level[int(level)] += 1

    capacity = spec.fan_out[1]
    levels: list[list[int]] = [list(range(1, n_inputs + 1))]
    fan_out = {gate_id: 0 for gate_id in levels[0]}
    gates = [Gate(gate_id, GateKind.INPUT) for gate_id in levels[0]]
    next_id = n_inputs + 1

    def pick(candidates: list[int]) -> int | None:
        open_ = [g for g in candidates if fan_out[g] < capacity]
        if not open_:
            return None
        unused = [g for g in open_ if fan_out[g] == 0]
        pool = unused if unused and rng.random() < 0.7 else open_
        return pool[int(rng.integers(len(pool)))]

    for level in range(1, depth + 1):
        current: list[int] = []
        below = [g for lower in levels for g in lower]
        for _ in range(per_level[level - 1]):
            kind = _kind(rng, spec)
            fan_in = 1 if kind is GateKind.NOT else _between(rng, spec.fan_in)
            first = pick(levels[level - 1])
            if first is None:
                raise CircuitValidationError("fan-out capacity exhausted")
            inputs = [first]
            fan_out[first] += 1
            for _ in range(fan_in - 1):
                other = pick(below)
                if other is None:
                    break
                inputs.append(other)
                fan_out[other] += 1
            gates.append(Gate(next_id, kind, tuple(inputs)))
            fan_out[next_id] = 0
            current.append(next_id)
            next_id += 1
        levels.append(current)

    outputs = [g.id for g in gates if g.kind is not GateKind.INPUT and fan_out[g.id] == 0]
    used = [g for g in gates if g.kind is not GateKind.INPUT or fan_out[g.id] > 0]
    return build_circuit(name, used, outputs)


def _within(circuit: Circuit, spec: CorpusSpec) -> bool:
    shape = stats(circuit)
    return (
        spec.depth[0] <= shape.D <= spec.depth[1]
        and spec.gates[0] <= shape.G <= spec.gates[1]
        and spec.inputs[0] <= shape.inputs <= spec.inputs[1]
        and spec.fan_out[0] <= shape.F_out <= spec.fan_out[1]
    )


def generate_circuit(rng: np.random.Generator, spec: CorpusSpec, name: str) -> Circuit:
    make = _formula if spec.fan_out[1] == 1 else _dag
    for _ in range(MAX_ATTEMPTS):
        try:
            circuit = make(rng, spec, name)
        except CircuitValidationError:
            continue
        if _within(circuit, spec):
            return circuit
    raise CorpusSpecError(f"could not generate a circuit within the requested ranges for {name}")


def generate_corpus(spec: CorpusSpec) -> list[Circuit]:
    """Deterministic by ``spec.seed``; formulas whenever the fan-out range is {1}."""
    validate_spec(spec)
    rng = np.random.default_rng(spec.seed)
    circuits = [
        generate_circuit(rng, spec, f"{spec.name_prefix}_{index:03d}") for index in range(spec.count)
    ]
    logger.info("generated corpus", extra={"count": len(circuits), "seed": spec.seed})
    return circuits


def write_corpus(circuits: list[Circuit], out_dir: str | Path) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for circuit in circuits:
        path = out_dir / f"{circuit.name}.net"
        path.write_text(format_netlist(circuit), encoding="utf-8")
        paths.append(path)
    return paths
