from __future__ import annotations

import logging
from collections import Counter
from collections.abc import Mapping, Sequence

from app.core.config import get_settings
from app.models.circuit import Circuit, DemandMap, GateKind
from app.models.crn import Alphabet, Configuration, RuleSpec
from app.models.program import (
    Backend,
    Compilation,
    CompilationReport,
    InputEncoding,
    OutputDecoding,
    StepProgram,
)
from app.services.circuits import (
    demand_analysis,
    is_formula,
    normalize_levels,
    stats,
    wire_width,
)
from app.services.crn import bind_rules, format_rule
from app.services.errors import CompilationError, DemandOverflowError, EncodingError
from app.services.lowering import (
    DX,
    DY,
    FanIn,
    lower_conversion,
    lower_gate,
    output_species,
    x_species,
    y_species,
)

logger = logging.getLogger(__name__)

DELETERS = frozenset({DX, DY})


class _ProgramBuilder:
    def __init__(self) -> None:
        self.steps: list[Counter[str]] = []
        self.rule_steps: dict[RuleSpec, int] = {}
        self.species: dict[str, None] = {}

    def new_step(self) -> int:
        self.steps.append(Counter())
        return len(self.steps) - 1

    def add(self, step: int, additions: Mapping[str, int]) -> None:
        for name, count in additions.items():
            if count:
                self.species.setdefault(name)
                self.steps[step][name] += count

    def rule(self, spec: RuleSpec, step: int) -> None:
        known = self.rule_steps.setdefault(spec, step)
        if known != step:
            raise CompilationError(f"rule {format_rule(spec)} scheduled for steps {known} and {step}")
        for name in spec.species:
            self.species.setdefault(name)

    def build(
        self, name: str, inputs: Sequence[InputEncoding], outputs: Sequence[OutputDecoding]
    ) -> StepProgram:
        for encoding in inputs:
            self.species.setdefault(encoding.zero[0])
            self.species.setdefault(encoding.one[0])
        for decoding in outputs:
            self.species.setdefault(decoding.zero)
            self.species.setdefault(decoding.one)
        alphabet = Alphabet.of(self.species)
        return StepProgram(
            name=name,
            alphabet=alphabet,
            rules=bind_rules(alphabet, self.rule_steps),
            steps=tuple(Configuration.of(alphabet, step) for step in self.steps),
            inputs=tuple(inputs),
            outputs=tuple(outputs),
        )


def _check_capacity(demand: DemandMap) -> None:
    capacity = get_settings().max_count
    if capacity is None:
        return
    for gate_id, copies in demand.items():
        if copies > capacity:
            raise DemandOverflowError(gate_id, copies, capacity)


def _wire_copies(circuit: Circuit, demand: DemandMap, producer: int) -> list[tuple[int, int]]:
    return [
        (wire.index, 1 if wire.is_output else demand[wire.consumer])
        for wire in circuit.outgoing(producer)
    ]


def _convert_level(
    builder: _ProgramBuilder,
    circuit: Circuit,
    demand: DemandMap,
    level: int,
    step: int,
    *,
    catalytic: bool = False,
) -> None:
    for gate in circuit.at_level(level):
        trues, falses = output_species(gate.kind, gate.id, gate.inputs)
        additions, rules = lower_conversion(
            trues, falses, _wire_copies(circuit, demand, gate.id), catalytic=catalytic
        )
        builder.add(step, additions)
        for spec in rules:
            builder.rule(spec, step)


def _gate_level(
    builder: _ProgramBuilder, circuit: Circuit, demand: DemandMap, level: int
) -> int:
    """Emit the gate steps of one level; returns the last step used."""
    gates = circuit.at_level(level)
    width = 3 if any(gate.kind is GateKind.MAJ for gate in gates) else 1
    base = len(builder.steps)
    for _ in range(width):
        builder.new_step()
    for gate in gates:
        fan_in = [FanIn(wire.producer, wire.index) for wire in circuit.incoming(gate.id)]
        lowering = lower_gate(gate.kind, gate.id, fan_in, demand[gate.id])
        for offset, additions in enumerate(lowering.additions):
            builder.add(base + offset, additions)
        for spec, offset in zip(lowering.rules, lowering.rule_offsets):
            builder.rule(spec, base + offset)
    return base + width - 1


def _sources(
    builder: _ProgramBuilder, circuit: Circuit, demand: DemandMap, step: int
) -> tuple[list[InputEncoding], int]:
    encodings: list[InputEncoding] = []
    volume = 0
    for gate in circuit.gates:
        if gate.kind is GateKind.INPUT:
            copies = demand[gate.id]
            encodings.append(
                InputEncoding(gate.id, (y_species(gate.id, 0), copies), (y_species(gate.id, 1), copies))
            )
            volume += copies
        elif gate.kind.is_constant:
            builder.add(step, {y_species(gate.id, gate.kind is GateKind.CONST_ONE): demand[gate.id]})
    return encodings, volume


def _decodings(original: Circuit, normalized: Circuit) -> list[OutputDecoding]:
    decodings = []
    for position, gate_id in enumerate(original.outputs):
        wire = normalized.output_wire(position)
        decodings.append(OutputDecoding(gate_id, x_species(wire.index, 0), x_species(wire.index, 1)))
    return decodings


def _report(
    backend: Backend,
    circuit: Circuit,
    program: StepProgram,
    demand: DemandMap,
    buffers: int,
    input_volume: int,
    completion: Mapping[int, int],
    checkpoints: Sequence[int],
) -> CompilationReport:
    n_gates = len(circuit.gates)
    n_wires = len(circuit.wires)
    circuit_stats = stats(circuit)
    static_volume = sum(step.volume for step in program.steps) + input_volume
    base_volume = 3 * n_gates + 5 * n_wires
    if backend is Backend.CATALYST:
        predicted = {
            "species": 5 * n_gates + 3 * n_wires + 2,
            "steps": 8 * circuit.depth + 5,
            "static_volume": base_volume + 4 * (circuit.depth + 1),
            "resident_volume": wire_width(circuit),
        }
    else:
        scale = 1 if backend is Backend.FORMULA else circuit_stats.F_out**circuit.depth
        predicted = {
            "species": 5 * n_gates + 3 * n_wires,
            "steps": 4 * circuit.depth + 1,
            "static_volume": base_volume * scale,
        }
    return CompilationReport(
        backend=backend,
        circuit=circuit.name,
        species_count=len(program.alphabet),
        step_count=program.step_count,
        static_volume=static_volume,
        gates=n_gates,
        wires=n_wires,
        depth=circuit.depth,
        fan_out=circuit_stats.F_out,
        width=circuit_stats.W,
        wire_width=wire_width(circuit),
        buffers_inserted=buffers,
        predicted=predicted,
        demand=demand,
        completion_step=dict(completion),
        checkpoints=tuple(checkpoints),
    )


def _log(compilation: Compilation) -> Compilation:
    report = compilation.report
    logger.info(
        "compiled program",
        extra={
            "backend": report.backend.value,
            "circuit": report.circuit,
            "species": report.species_count,
            "steps": report.step_count,
            "static_volume": report.static_volume,
            "buffers": report.buffers_inserted,
        },
    )
    return compilation


def _compile_void(circuit: Circuit, backend: Backend) -> Compilation:
    normalized, buffers = normalize_levels(circuit)
    demand = demand_analysis(normalized)
    _check_capacity(demand)

    builder = _ProgramBuilder()
    completion: dict[int, int] = {}
    checkpoints: list[int] = []

    step = builder.new_step()
    encodings, input_volume = _sources(builder, normalized, demand, step)
    _convert_level(builder, normalized, demand, 0, step)
    checkpoints.append(step)
    for gate in normalized.at_level(0):
        completion[gate.id] = step

    for level in range(1, normalized.depth + 1):
        last = _gate_level(builder, normalized, demand, level)
        for gate in normalized.at_level(level):
            completion[gate.id] = last
        step = builder.new_step()
        _convert_level(builder, normalized, demand, level, step)
        checkpoints.append(step)

    program = builder.build(circuit.name, encodings, _decodings(circuit, normalized))
    report = _report(
        backend, normalized, program, demand, buffers, input_volume, completion, checkpoints
    )
    return _log(Compilation(program, report, normalized, dict(builder.rule_steps)))


def compile_formula(circuit: Circuit) -> Compilation:
    """(2,0) compilation of a threshold formula: every gate gets exactly one copy of everything."""
    if not is_formula(circuit):
        raise CompilationError(f"{circuit.name} is not a formula (fan-out 1, single output)")
    return _compile_void(circuit, Backend.FORMULA)


def compile_circuit_exp(circuit: Circuit) -> Compilation:
    """(2,0) compilation of an arbitrary circuit; addition counts scale with each gate's demand."""
    return _compile_void(circuit, Backend.EXP)


def _deleter_rules(builder: _ProgramBuilder, deleter: str, targets: Sequence[str], step: int) -> None:
    for target in targets:
        builder.rule(RuleSpec.catalytic(deleter, target), step)


def compile_circuit_catalyst(circuit: Circuit) -> Compilation:
    """(2,0) + (2,1) compilation with constant multiplicity.

    Every level runs five steps: delete x/a/b with ``dx``, remove ``dx``, convert
    catalytically, delete y with ``dy``, remove ``dy``. The next level's gate steps follow.
    """
    normalized, buffers = normalize_levels(circuit)
    ones = DemandMap({gate.id: 1 for gate in normalized.gates})
    builder = _ProgramBuilder()
    completion: dict[int, int] = {}
    checkpoints: list[int] = []
    delete_x: list[int] = []
    delete_y: list[int] = []
    remove_x: list[int] = []
    remove_y: list[int] = []
    encodings: list[InputEncoding] = []
    input_volume = 0

    for level in range(normalized.depth + 1):
        if level:
            last = _gate_level(builder, normalized, ones, level)
            for gate in normalized.at_level(level):
                completion[gate.id] = last
        step = builder.new_step()
        if level == 0:
            encodings, input_volume = _sources(builder, normalized, ones, step)
        builder.add(step, {DX: 1})
        delete_x.append(step)
        step = builder.new_step()
        builder.add(step, {DX: 1})
        remove_x.append(step)
        step = builder.new_step()
        _convert_level(builder, normalized, ones, level, step, catalytic=True)
        if level == 0:
            for gate in normalized.at_level(0):
                completion[gate.id] = step
        step = builder.new_step()
        builder.add(step, {DY: 1})
        delete_y.append(step)
        step = builder.new_step()
        builder.add(step, {DY: 1})
        remove_y.append(step)
        checkpoints.append(step)

    # deleter rules cover every species of their family, so they are added last
    names = [name for name in builder.species if name not in DELETERS]
    _deleter_rules(builder, DX, [n for n in names if n[0] in "xab"], delete_x[0])
    _deleter_rules(builder, DY, [n for n in names if n[0] == "y"], delete_y[0])
    builder.rule(RuleSpec.void(DX, DX), remove_x[0])
    builder.rule(RuleSpec.void(DY, DY), remove_y[0])

    program = builder.build(circuit.name, encodings, _decodings(circuit, normalized))
    report = _report(
        Backend.CATALYST, normalized, program, ones, buffers, input_volume, completion, checkpoints
    )
    return _log(Compilation(program, report, normalized, dict(builder.rule_steps)))


COMPILERS = {
    Backend.FORMULA: compile_formula,
    Backend.EXP: compile_circuit_exp,
    Backend.CATALYST: compile_circuit_catalyst,
}


def compile_circuit(circuit: Circuit, backend: Backend | str) -> Compilation:
    return COMPILERS[Backend(backend)](circuit)


def encode_input(program: StepProgram, bits: Sequence[int] | Mapping[int, int]) -> Configuration:
    """Species to merge into the first step: the chosen polarity of every input, never both."""
    if isinstance(bits, Mapping):
        wanted = [encoding.gate_id for encoding in program.inputs]
        if sorted(bits) != sorted(wanted):
            raise EncodingError(f"assignment must cover exactly inputs {wanted}")
        chosen = [bits[gate_id] for gate_id in wanted]
    else:
        chosen = list(bits)
        if len(chosen) != len(program.inputs):
            raise EncodingError(f"expected {len(program.inputs)} input bits, got {len(chosen)}")
    additions: Counter[str] = Counter()
    for encoding, bit in zip(program.inputs, chosen):
        if bit not in (0, 1):
            raise EncodingError(f"input {encoding.gate_id} is not a bit: {bit!r}")
        name, copies = encoding.choose(bit)
        additions[name] += copies
    return Configuration.of(program.alphabet, additions)


def species_births(program: StepProgram) -> dict[str, list[int]]:
    births: dict[str, list[int]] = {}
    for index, step in enumerate(program.steps):
        for name in step.sparse():
            births.setdefault(name, []).append(index)
    for encoding in program.inputs:
        for name, _ in (encoding.zero, encoding.one):
            if 0 not in births.setdefault(name, []):
                births[name].insert(0, 0)
    return births


def check_discipline(compilation: Compilation) -> list[str]:
    """Static checks that leftover species can never react outside their intended step.

    Every non-deleter species must be introduced in exactly one step, and every
    rule's most recently introduced reactant must be introduced in the step the
    rule was compiled for. Returns a list of violations, empty when clean.
    """
    program = compilation.program
    births = species_births(program)
    problems: list[str] = []
    for name, steps in births.items():
        if name not in DELETERS and len(steps) > 1:
            problems.append(f"{name} introduced in steps {steps}")
    for spec, intended in compilation.rule_steps.items():
        if DELETERS.intersection(spec.reactants):
            continue
        missing = [name for name in spec.reactants if name not in births]
        if missing:
            problems.append(f"{format_rule(spec)} uses species never introduced: {missing}")
            continue
        latest = max(births[name][0] for name in spec.reactants)
        if latest != intended:
            problems.append(f"{format_rule(spec)} can fire at step {latest}, compiled for {intended}")
    return problems
