from __future__ import annotations

import itertools
import logging
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from app.core.config import get_settings
from app.models.circuit import Circuit, GateKind
from app.models.crn import Configuration
from app.models.program import Backend, Compilation, Schedule, StepProgram
from app.schemas.api import Counterexample, InputMode, VerifySummary
from app.services.circuits import evaluate, gate_values
from app.services.compilers import DELETERS, check_discipline, compile_circuit
from app.services.engine import decode_output, enumerate_program_terminals, run_program
from app.services.errors import DecodeError, EncodingError, StateCapExceededError
from app.services.lowering import a_species
from app.services.utils import format_bits

logger = logging.getLogger(__name__)


def assignments(n_inputs: int, mode: InputMode, input_seed: int = 0) -> list[tuple[int, ...]]:
    if mode.kind == "ALL":
        cap = get_settings().input_cap
        if n_inputs > cap:
            raise EncodingError(f"ALL input mode supports at most {cap} inputs, circuit has {n_inputs}")
        return list(itertools.product((0, 1), repeat=n_inputs))
    rng = np.random.default_rng(input_seed)
    return [tuple(int(b) for b in rng.integers(0, 2, size=n_inputs)) for _ in range(mode.count)]


@dataclass(frozen=True)
class MajorityCheck:
    """Where a MAJ gate's pairing sub-step ends and how many majority copies must survive it."""

    gate_id: int
    step: int
    multiplicity: int


@dataclass(frozen=True)
class _Task:
    circuit: Circuit
    program: StepProgram
    backend: Backend
    bits: tuple[int, ...]
    seeds: tuple[int, ...]
    exhaustive: bool
    volume_cap: int
    state_cap: int
    static_volume: int | None
    checkpoints: tuple[int, ...]
    resident_cap: int | None
    lowered: Circuit | None = None
    majority: tuple[MajorityCheck, ...] = ()


@dataclass
class _Outcome:
    checked: int = 0
    passed: int = 0
    exhaustive_checked: int = 0
    exhaustive_skipped: int = 0
    bounds_ok: bool = True
    majority_violations: set[int] = field(default_factory=set)
    counterexample: Counterexample | None = None


def majority_checks(compilation: Compilation) -> tuple[MajorityCheck, ...]:
    report = compilation.report
    return tuple(
        MajorityCheck(gate.id, report.completion_step[gate.id] - 1, report.demand[gate.id])
        for gate in compilation.circuit.gates
        if gate.kind is GateKind.MAJ
    )


def majority_settled(config: Configuration, check: MajorityCheck, value: int) -> bool:
    """No losing-polarity ``a`` copy is left and the winning one has a copy per unit of multiplicity."""
    winner = config.count(a_species(check.gate_id, value))
    loser = config.count(a_species(check.gate_id, 1 - value))
    return loser == 0 and winner >= check.multiplicity


def _counterexample(
    task: _Task,
    expected: tuple[int, ...],
    seed: int | None,
    observed: tuple[int, ...] | None,
    error: str | None,
    terminal: Configuration,
) -> Counterexample:
    return Counterexample(
        circuit=task.circuit.name,
        backend=task.backend,
        bits=format_bits(task.bits),
        seed=seed,
        expected=list(expected),
        observed=None if observed is None else list(observed),
        error=error,
        terminal=terminal.sparse(),
    )


def _check_assignment(task: _Task) -> _Outcome:
    outcome = _Outcome()
    expected = evaluate(task.circuit, task.bits)
    values: dict[int, int] = {}
    if task.majority and task.lowered is not None:
        inputs = [gate.id for gate in task.circuit.input_gates]
        values = gate_values(task.lowered, dict(zip(inputs, task.bits)))
    for seed in task.seeds:
        result = run_program(task.program, task.bits, Schedule(seed))
        outcome.checked += 1
        if result.decoded == expected:
            outcome.passed += 1
        elif outcome.counterexample is None:
            outcome.counterexample = _counterexample(
                task, expected, seed, result.decoded, result.decode_error, result.final
            )
        if task.static_volume is not None and result.peak_volume > task.static_volume:
            outcome.bounds_ok = False
        for step in task.checkpoints:
            resident = result.per_step_terminal[step]
            if any(resident.count(name) for name in DELETERS if name in resident.alphabet):
                outcome.bounds_ok = False
            if task.resident_cap is not None and resident.volume > task.resident_cap:
                outcome.bounds_ok = False
        for check in task.majority:
            if not majority_settled(result.per_step_terminal[check.step], check, values[check.gate_id]):
                outcome.majority_violations.add(check.gate_id)

    if task.exhaustive:
        try:
            found = enumerate_program_terminals(
                task.program, task.bits, volume_cap=task.volume_cap, state_cap=task.state_cap
            )
        except StateCapExceededError:
            outcome.exhaustive_skipped += 1
            return outcome
        if not found.complete:
            outcome.exhaustive_skipped += 1
            return outcome
        outcome.exhaustive_checked += 1
        for terminal in sorted(found.terminals, key=lambda c: c.counts):
            try:
                decoded, error = decode_output(terminal, task.program), None
            except DecodeError as exc:
                decoded, error = None, str(exc)
            if decoded != expected:
                outcome.checked += 1
                if outcome.counterexample is None:
                    outcome.counterexample = _counterexample(
                        task, expected, None, decoded, error, terminal
                    )
                break
    return outcome


def verify_circuit(
    circuit: Circuit,
    backend: Backend | str = Backend.FORMULA,
    *,
    inputs: InputMode | None = None,
    seeds: Sequence[int] | None = None,
    exhaustive: bool = False,
    volume_cap: int | None = None,
    input_seed: int = 0,
    program: StepProgram | None = None,
    workers: int | None = None,
) -> VerifySummary:
    """Compare compiled-program decodes with direct evaluation on every requested input and seed.

    With ``program`` the given (possibly hand-edited) program is checked instead of a
    fresh compilation, and the static resource checks are skipped.
    """
    settings = get_settings()
    backend = Backend(backend)
    inputs = inputs or InputMode()
    seeds = tuple(seeds if seeds is not None else range(settings.default_seed_count))
    volume_cap = volume_cap if volume_cap is not None else settings.exhaustive_volume_cap
    workers = workers or settings.workers

    compilation: Compilation | None = None
    bounds_ok = True
    if program is None:
        compilation = compile_circuit(circuit, backend)
        program = compilation.program
        bounds_ok = compilation.report.within_bounds() and not check_discipline(compilation)

    report = compilation.report if compilation else None
    catalyst = report is not None and backend is Backend.CATALYST
    tasks = [
        _Task(
            circuit=circuit,
            program=program,
            backend=backend,
            bits=bits,
            seeds=seeds,
            exhaustive=exhaustive,
            volume_cap=volume_cap,
            state_cap=settings.state_cap,
            static_volume=report.static_volume if report else None,
            checkpoints=report.checkpoints if catalyst else (),
            resident_cap=report.predicted.get("resident_volume") if catalyst else None,
            lowered=compilation.circuit if compilation else None,
            majority=majority_checks(compilation) if compilation else (),
        )
        for bits in assignments(len(circuit.input_gates), inputs, input_seed)
    ]

    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_check_assignment, tasks))
    else:
        outcomes = [_check_assignment(task) for task in tasks]

    first = next((o.counterexample for o in outcomes if o.counterexample is not None), None)
    summary = VerifySummary(
        circuit=circuit.name,
        backend=backend,
        checked=sum(o.checked for o in outcomes),
        passed=sum(o.passed for o in outcomes),
        failed=sum(o.checked - o.passed for o in outcomes),
        exhaustive_checked=sum(o.exhaustive_checked for o in outcomes),
        exhaustive_skipped=sum(o.exhaustive_skipped for o in outcomes),
        bounds_ok=bounds_ok and all(o.bounds_ok for o in outcomes),
        majority_violations=sorted(set().union(*(o.majority_violations for o in outcomes))),
        counterexample=first,
    )
    extra = {"circuit": circuit.name, "backend": backend.value, "checked": summary.checked}
    if summary.ok:
        logger.info("verification passed", extra=extra)
    else:
        logger.warning(
            "verification failed",
            extra={**extra, "failed": summary.failed, "majority": summary.majority_violations},
        )
    return summary
