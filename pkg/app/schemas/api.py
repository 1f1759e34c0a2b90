from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from app.models.circuit import GateKind
from app.models.program import Backend


class GateDocument(BaseModel):
    id: int
    kind: GateKind
    inputs: list[int] = Field(default_factory=list)


class NetlistDocument(BaseModel):
    """JSON form of a netlist, interchangeable with the line-oriented text form."""

    name: str = 'circuit'
    gates: list[GateDocument]
    outputs: list[int]


class CompilationReportModel(BaseModel):
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
    predicted: dict[str, int]
    demand: dict[int, int]
    completion_step: dict[int, int]
    checkpoints: list[int]
    within_bounds: bool


class CompileRequest(BaseModel):
    netlist: str
    backend: Backend = Backend.FORMULA


class CompileResponse(BaseModel):
    program: str
    report: CompilationReportModel


class RunRequest(BaseModel):
    program: str
    bits: str
    seed: int = 0
    trace: bool = False


class RunResponse(BaseModel):
    ok: bool
    outputs: list[int] | None = None
    error: str | None = None
    peak_volume: int
    step_count: int
    final: dict[str, int]
    trace: list[str] = Field(default_factory=list)


class InputMode(BaseModel):
    kind: str = 'ALL'
    count: int = 0

    @model_validator(mode='after')
    def _check(self) -> InputMode:
        if self.kind not in {'ALL', 'RANDOM'}:
            raise ValueError('input mode must be ALL or RANDOM')
        if self.kind == 'RANDOM' and self.count < 1:
            raise ValueError('RANDOM input mode needs a positive count')
        return self


class Counterexample(BaseModel):
    circuit: str
    backend: Backend
    bits: str
    seed: int | None
    expected: list[int]
    observed: list[int] | None
    error: str | None = None
    terminal: dict[str, int] = Field(default_factory=dict)


class VerifySummary(BaseModel):
    circuit: str
    backend: Backend
    checked: int
    passed: int
    failed: int
    exhaustive_checked: int = 0
    exhaustive_skipped: int = 0
    bounds_ok: bool = True
    # MAJ gates whose pairing sub-step left a losing-polarity copy behind
    majority_violations: list[int] = Field(default_factory=list)
    counterexample: Counterexample | None = None

    @property
    def ok(self) -> bool:
        return self.failed == 0 and self.bounds_ok and not self.majority_violations


class VerifyRequest(BaseModel):
    netlist: str
    backend: Backend = Backend.FORMULA
    inputs: InputMode = Field(default_factory=InputMode)
    # None means settings.default_seed_count seeds starting at 0
    seeds: list[int] | None = None
    exhaustive: bool = False


class LowerBoundRow(BaseModel):
    depth: int
    fib: int
    chain_bound: int
    propagated_bound: int
    measured_demand: int
    static_volume: int
    passed: bool


class CorpusSpec(BaseModel):
    count: int = 10
    seed: int = 0
    depth: tuple[int, int] = (1, 4)
    gates: tuple[int, int] = (1, 12)
    fan_in: tuple[int, int] = (1, 3)
    fan_out: tuple[int, int] = (1, 1)
    inputs: tuple[int, int] = (1, 6)
    maj_fraction: float = 0.3
    not_fraction: float = 0.15
    name_prefix: str = 'gen'
