from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum

from app.models.circuit import Circuit, DemandMap, GateKind
from app.models.crn import Alphabet, Configuration, Rule, RuleSpec


class Backend(str, Enum):
    FORMULA = "formula"
    EXP = "exp"
    CATALYST = "catalyst"


@dataclass(frozen=True)
class InputEncoding:
    """Species merged into s_0 for one circuit input: ``zero`` when the bit is 0, ``one`` otherwise."""

    gate_id: int
    zero: tuple[str, int]
    one: tuple[str, int]

    def choose(self, bit: int) -> tuple[str, int]:
        return self.one if bit else self.zero


@dataclass(frozen=True)
class OutputDecoding:
    gate_id: int
    zero: str
    one: str


@dataclass(frozen=True)
class StepProgram:
    name: str
    alphabet: Alphabet
    rules: tuple[Rule, ...]
    steps: tuple[Configuration, ...]
    inputs: tuple[InputEncoding, ...] = ()
    outputs: tuple[OutputDecoding, ...] = ()

    @property
    def step_count(self) -> int:
        return len(self.steps)


class SchedulePolicy(str, Enum):
    RANDOM_MAXIMAL = "RANDOM_MAXIMAL"


@dataclass(frozen=True)
class Schedule:
    seed: int = 0
    policy: SchedulePolicy = SchedulePolicy.RANDOM_MAXIMAL

    def __post_init__(self) -> None:
        object.__setattr__(self, "seed", self.seed & 0xFFFF_FFFF_FFFF_FFFF)


@dataclass(frozen=True)
class RunResult:
    final: Configuration
    per_step_terminal: tuple[Configuration, ...]
    peak_volume: int
    step_count: int
    decoded: tuple[int, ...] | None
    decode_error: str | None = None
    trace: tuple[str, ...] = ()


@dataclass(frozen=True)
class GateLowering:
    """Additions (one mapping per sub-step) and rules for one gate.

    ``rule_offsets[i]`` is the sub-step in which ``rules[i]`` is meant to fire.
    """

    gate_id: int
    kind: GateKind
    additions: tuple[Mapping[str, int], ...]
    rules: tuple[RuleSpec, ...]
    rule_offsets: tuple[int, ...]

    @property
    def steps_used(self) -> int:
        return len(self.additions)


@dataclass(frozen=True)
class CompilationReport:
    backend: Backend
    circuit: str
    species_count: int
    step_count: int
    static_volume: int
    gates: int
    wires: int
    depth: int
    fan_out: int
    width: int
    wire_width: int
    buffers_inserted: int
    predicted: Mapping[str, int]
    demand: DemandMap
    completion_step: Mapping[int, int]
    checkpoints: tuple[int, ...]

    def within_bounds(self) -> bool:
        measured = {
            "species": self.species_count,
            "steps": self.step_count,
            "static_volume": self.static_volume,
        }
        return all(measured[key] <= bound for key, bound in self.predicted.items() if key in measured)


@dataclass(frozen=True)
class Compilation:
    program: StepProgram
    report: CompilationReport
    circuit: Circuit
    rule_steps: Mapping[RuleSpec, int] = field(default_factory=dict)
