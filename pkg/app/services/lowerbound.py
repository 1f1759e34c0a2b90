from __future__ import annotations

import itertools
import logging
from collections.abc import Mapping
from dataclasses import dataclass, field

from app.models.circuit import Circuit, Gate, GateKind
from app.services.circuits import build_circuit, evaluate
from app.services.compilers import compile_circuit_exp
from app.services.errors import SFunctionSpecError

logger = logging.getLogger(__name__)

Bits = tuple[int, int, int]

# the five rows the lower-bound argument depends on
CONSTRAINED_ROWS: Mapping[Bits, Bits] = {
    (1, 1, 1): (1, 1, 1),
    (0, 1, 1): (0, 0, 0),
    (1, 0, 1): (0, 1, 1),
    (1, 1, 0): (1, 0, 1),
    (0, 0, 0): (1, 1, 0),
}
FREE_ROWS: tuple[Bits, ...] = ((0, 0, 1), (0, 1, 0), (1, 0, 0))


def bits_of(text: str) -> Bits:
    if len(text) != 3 or set(text) - {"0", "1"}:
        raise SFunctionSpecError(f"expected three bits, got {text!r}")
    return tuple(int(ch) for ch in text)  # type: ignore[return-value]


def bits_text(bits: tuple[int, ...]) -> str:
    return "".join(map(str, bits))


@dataclass(frozen=True)
class SFunctionSpec:
    """The stage function: fixed constrained rows plus a chosen completion for the rest."""

    completion: Mapping[Bits, Bits] = field(
        default_factory=lambda: {row: row for row in FREE_ROWS}
    )

    def __post_init__(self) -> None:
        if set(self.completion) != set(FREE_ROWS):
            raise SFunctionSpecError("completion must cover exactly rows 001, 010 and 100")
        for row, value in self.completion.items():
            if len(value) != 3 or any(bit not in (0, 1) for bit in value):
                raise SFunctionSpecError(f"completion for {bits_text(row)} is not three bits")

    @classmethod
    def from_text(cls, completion: Mapping[str, str]) -> SFunctionSpec:
        return cls({bits_of(row): bits_of(value) for row, value in completion.items()})

    @property
    def rows(self) -> dict[Bits, Bits]:
        return {**CONSTRAINED_ROWS, **self.completion}

    def __call__(self, bits: Bits) -> Bits:
        return self.rows[bits]


def _stage_gates(
    spec: SFunctionSpec, inputs: Bits, next_id: int
) -> tuple[list[Gate], Bits, int]:
    """Literal layer, one AND per on-row, one OR per output bit; returns gates, outputs, next id."""
    rows = spec.rows
    on_rows = [row for row in itertools.product((0, 1), repeat=3) if any(rows[row])]
    gates: list[Gate] = []

    literals: dict[tuple[int, int], int] = {}
    for position, polarity in sorted({(i, row[i]) for row in on_rows for i in range(3)}):
        kind = GateKind.OR if polarity else GateKind.NOT
        gates.append(Gate(next_id, kind, (inputs[position],)))
        literals[(position, polarity)] = next_id
        next_id += 1

    minterms: dict[Bits, int] = {}
    for row in on_rows:
        gates.append(Gate(next_id, GateKind.AND, tuple(literals[(i, row[i])] for i in range(3))))
        minterms[row] = next_id
        next_id += 1

    outputs: list[int] = []
    for bit in range(3):
        terms = tuple(minterms[row] for row in on_rows if rows[row][bit])
        gates.append(Gate(next_id, GateKind.OR, terms))
        outputs.append(next_id)
        next_id += 1
    return gates, tuple(outputs), next_id  # type: ignore[return-value]


def _inputs() -> list[Gate]:
    return [Gate(gate_id, GateKind.INPUT) for gate_id in (1, 2, 3)]


def build_s_stage(spec: SFunctionSpec | None = None) -> Circuit:
    spec = spec or SFunctionSpec()
    gates, outputs, _ = _stage_gates(spec, (1, 2, 3), 4)
    return build_circuit("s_stage", _inputs() + gates, outputs)


def build_VD(depth: int, spec: SFunctionSpec | None = None) -> Circuit:
    """``depth`` chained stages; each stage's three outputs are the next stage's inputs."""
    if depth < 1:
        raise SFunctionSpecError(f"depth must be at least 1, got {depth}")
    spec = spec or SFunctionSpec()
    gates = _inputs()
    wires: Bits = (1, 2, 3)
    next_id = 4
    for _ in range(depth):
        stage, wires, next_id = _stage_gates(spec, wires, next_id)
        gates += stage
    return build_circuit(f"V_{depth}", gates, wires)


def fibonacci(count: int) -> list[int]:
    """a_0 .. a_{count-1} with a_0 = a_1 = 1."""
    seq: list[int] = []
    for k in range(count):
        seq.append(1 if k < 2 else seq[-1] + seq[-2])
    return seq


@dataclass(frozen=True)
class FibBound:
    a: tuple[int, ...]

    @classmethod
    def up_to(cls, depth: int) -> FibBound:
        return cls(tuple(fibonacci(depth + 1)))

    def __getitem__(self, k: int) -> int:
        return self.a[k]


@dataclass(frozen=True)
class CopyBound:
    stage: int
    bound: int
    # copies of x2 the same stage needs
    x2: int
    # (x1, x2) bounds of stage k-1 that the first inequality adds up; None at stage 0
    witness: tuple[int, int] | None


def min_copy_bounds(depth: int) -> list[CopyBound]:
    """Lower bounds on the copies of x1 at stages 0..depth from the chained inequalities.

    Stage 0 needs one copy of x1, since x1 decides the output on 111, and no copy
    of x2. Every later stage applies x1_k >= x1_{k-1} + x2_{k-1} together with
    x2_k >= x1_{k-1}, taking the smallest value each inequality allows.
    """
    if depth < 0:
        raise SFunctionSpecError("depth must be non-negative")
    bounds = [CopyBound(0, 1, 0, None)]
    for k in range(1, depth + 1):
        previous = bounds[-1]
        x1 = previous.bound + previous.x2
        x2 = previous.bound
        bounds.append(CopyBound(k, x1, x2, (previous.bound, previous.x2)))
    return bounds


def propagate_copy_bounds(depth: int) -> list[tuple[int, int, int]]:
    """Copy bounds for (x1, x2, x3) at stages 0..depth using every inequality, not just the chain.

    Stage 0 feeds the three output bits, one copy each; a stage's inputs must cover
    x1 >= y1 + y2 + y3, x2 >= y1 and x3 >= y2, where y are the next stage's inputs.
    """
    if depth < 0:
        raise SFunctionSpecError("depth must be non-negative")
    bounds: list[tuple[int, int, int]] = []
    y = (1, 1, 1)
    for _ in range(depth + 1):
        x = (y[0] + y[1] + y[2], y[0], y[1])
        bounds.append(x)
        y = x
    return bounds


def flip_sensitivity(spec: SFunctionSpec | None = None) -> dict[int, tuple[int, ...]]:
    """Output positions of the synthesized stage that change when one input flips away from 111."""
    stage = build_s_stage(spec)
    base = evaluate(stage, (1, 1, 1))
    flips: dict[int, tuple[int, ...]] = {}
    for position in range(3):
        bits = [1, 1, 1]
        bits[position] = 0
        value = evaluate(stage, bits)
        flips[position] = tuple(i for i in range(3) if value[i] != base[i])
    return flips


@dataclass(frozen=True)
class FibGrowthReport:
    depth: int
    fib: int
    chain_bound: int
    propagated_bound: int
    measured_demand: int
    static_volume: int

    @property
    def passed(self) -> bool:
        return self.measured_demand >= self.fib and self.static_volume >= self.fib


def verify_fib_growth(depth: int, spec: SFunctionSpec | None = None) -> FibGrowthReport:
    """Compile V_depth with demand scaling and compare the x1 demand against a_depth."""
    circuit = build_VD(depth, spec)
    compilation = compile_circuit_exp(circuit)
    report = FibGrowthReport(
        depth=depth,
        fib=FibBound.up_to(depth)[depth],
        chain_bound=min_copy_bounds(depth)[depth].bound,
        propagated_bound=propagate_copy_bounds(depth)[depth][0],
        measured_demand=compilation.report.demand[1],
        static_volume=compilation.report.static_volume,
    )
    log = logger.info if report.passed else logger.warning
    log(
        "lower bound check",
        extra={"depth": depth, "fib": report.fib, "demand": report.measured_demand},
    )
    return report
