from __future__ import annotations

import logging
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from app.core.config import get_settings
from app.models.crn import Configuration, Rule
from app.models.program import RunResult, Schedule, SchedulePolicy, StepProgram
from app.services.compilers import encode_input
from app.services.crn import format_rule, is_terminal, is_void_family
from app.services.errors import (
    AlphabetMismatchError,
    DecodeError,
    StateCapExceededError,
    StepBudgetExceededError,
)

logger = logging.getLogger(__name__)

TraceSink = Callable[[str], None]


class _ActiveRules:
    """Applicable rule indices with O(1) insert and swap-remove; iteration order is deterministic."""

    def __init__(self) -> None:
        self.items: list[int] = []
        self.slots: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self.items)

    def add(self, rule_index: int) -> None:
        if rule_index not in self.slots:
            self.slots[rule_index] = len(self.items)
            self.items.append(rule_index)

    def discard(self, rule_index: int) -> None:
        slot = self.slots.pop(rule_index, None)
        if slot is None:
            return
        last = self.items.pop()
        if last != rule_index:
            self.items[slot] = last
            self.slots[last] = slot


def _uniform(rng: np.random.Generator, active: _ActiveRules) -> int:
    return active.items[int(rng.integers(len(active)))]


CHOOSERS: dict[SchedulePolicy, Callable[[np.random.Generator, _ActiveRules], int]] = {
    SchedulePolicy.RANDOM_MAXIMAL: _uniform,
}


@dataclass
class _Simulator:
    rules: Sequence[Rule]
    rng: np.random.Generator
    budget: int | None
    trace: TraceSink | None = None
    policy: SchedulePolicy = SchedulePolicy.RANDOM_MAXIMAL

    def __post_init__(self) -> None:
        self.touching: dict[int, list[int]] = {}
        for index, rule in enumerate(self.rules):
            for ordinal, need in enumerate(rule.reactants):
                if need:
                    self.touching.setdefault(ordinal, []).append(index)
        self.labels = [format_rule(rule) for rule in self.rules] if self.trace else []
        self.choose = CHOOSERS[self.policy]

    def _fires(self, counts: list[int], rule_index: int) -> bool:
        reactants = self.rules[rule_index].reactants
        return all(have >= need for have, need in zip(counts, reactants))

    def run(self, start: Configuration, step: int) -> tuple[Configuration, int]:
        counts = list(start.counts)
        volume = sum(counts)
        peak = volume
        active = _ActiveRules()
        for index in range(len(self.rules)):
            if self._fires(counts, index):
                active.add(index)
        applications = 0
        while len(active):
            if self.budget is not None and applications >= self.budget:
                raise StepBudgetExceededError(
                    f"step {step} exceeded {self.budget} rule applications"
                )
            chosen = self.choose(self.rng, active)
            rule = self.rules[chosen]
            changed: list[int] = []
            for ordinal, delta in enumerate(rule.application):
                if delta:
                    counts[ordinal] += delta
                    volume += delta
                    changed.append(ordinal)
            applications += 1
            peak = max(peak, volume)
            if self.trace is not None:
                self.trace(f"step={step} rule={self.labels[chosen]} volume={volume}")
            recheck = {index for ordinal in changed for index in self.touching.get(ordinal, ())}
            for index in sorted(recheck):
                if self._fires(counts, index):
                    active.add(index)
                else:
                    active.discard(index)
        return Configuration(start.alphabet, tuple(counts)), peak


def _budget(rules: Sequence[Rule], budget: int | None) -> int | None:
    if is_void_family(rules):
        return None
    return budget if budget is not None else get_settings().step_budget


def run_step(
    config: Configuration,
    additions: Configuration,
    rules: Sequence[Rule],
    schedule: Schedule | None = None,
    *,
    rng: np.random.Generator | None = None,
    budget: int | None = None,
    trace: TraceSink | None = None,
    step: int = 0,
) -> Configuration:
    """Add ``additions`` and apply rules until none is applicable."""
    terminal, _ = _run_step(config, additions, rules, schedule, rng, budget, trace, step)
    return terminal


def _run_step(
    config: Configuration,
    additions: Configuration,
    rules: Sequence[Rule],
    schedule: Schedule | None,
    rng: np.random.Generator | None,
    budget: int | None,
    trace: TraceSink | None,
    step: int,
) -> tuple[Configuration, int]:
    if config.alphabet != additions.alphabet or any(r.alphabet != config.alphabet for r in rules):
        raise AlphabetMismatchError("step inputs use different alphabets")
    schedule = schedule or Schedule()
    if rng is None:
        rng = np.random.default_rng(schedule.seed)
    simulator = _Simulator(rules, rng, _budget(rules, budget), trace, schedule.policy)
    return simulator.run(config + additions, step)


def decode_output(config: Configuration, program: StepProgram) -> tuple[int, ...]:
    bits: list[int] = []
    for output in program.outputs:
        zero = config.count(output.zero) >= 1
        one = config.count(output.one) >= 1
        if zero and one:
            raise DecodeError(DecodeError.AMBIGUOUS, output.gate_id)
        if not zero and not one:
            raise DecodeError(DecodeError.MISSING, output.gate_id)
        bits.append(1 if one else 0)
    return tuple(bits)


def run_program(
    program: StepProgram,
    bits: Sequence[int] | Mapping[int, int],
    schedule: Schedule | None = None,
    *,
    trace: bool = False,
    budget: int | None = None,
) -> RunResult:
    schedule = schedule or Schedule()
    rng = np.random.default_rng(schedule.seed)
    lines: list[str] = []
    sink = lines.append if trace else None
    simulator = _Simulator(program.rules, rng, _budget(program.rules, budget), sink, schedule.policy)
    config = Configuration.empty(program.alphabet)
    seed_additions = encode_input(program, bits)
    per_step: list[Configuration] = []
    peak = 0
    for index, additions in enumerate(program.steps):
        if index == 0:
            additions = additions + seed_additions
        config, step_peak = simulator.run(config + additions, index)
        per_step.append(config)
        peak = max(peak, step_peak)

    decoded: tuple[int, ...] | None = None
    error: str | None = None
    try:
        decoded = decode_output(config, program)
    except DecodeError as exc:
        error = str(exc)
    logger.debug(
        "program run finished",
        extra={
            "program": program.name,
            "seed": schedule.seed,
            "policy": schedule.policy.value,
            "peak_volume": peak,
        },
    )
    return RunResult(
        final=config,
        per_step_terminal=tuple(per_step),
        peak_volume=peak,
        step_count=len(program.steps),
        decoded=decoded,
        decode_error=error,
        trace=tuple(lines),
    )


def enumerate_terminals(
    config: Configuration, rules: Sequence[Rule], state_cap: int | None = None
) -> set[Configuration]:
    """Exact TERM set by depth-first search over count vectors, memoized on the vector itself."""
    state_cap = state_cap if state_cap is not None else get_settings().state_cap
    if any(rule.alphabet != config.alphabet for rule in rules):
        raise AlphabetMismatchError("configuration and rules use different alphabets")
    seen: set[tuple[int, ...]] = {config.counts}
    stack = [config.counts]
    terminals: set[tuple[int, ...]] = set()
    while stack:
        counts = stack.pop()
        successors = [
            tuple(c + d for c, d in zip(counts, rule.application))
            for rule in rules
            if all(have >= need for have, need in zip(counts, rule.reactants))
        ]
        if not successors:
            terminals.add(counts)
            continue
        for nxt in successors:
            if nxt in seen:
                continue
            seen.add(nxt)
            if len(seen) > state_cap:
                raise StateCapExceededError(
                    f"more than {state_cap} configurations; instance too large for exhaustive mode"
                )
            stack.append(nxt)
    return {Configuration(config.alphabet, counts) for counts in sorted(terminals)}


@dataclass(frozen=True)
class ExhaustiveResult:
    terminals: frozenset[Configuration]
    complete: bool
    max_entry_volume: int


def enumerate_program_terminals(
    program: StepProgram,
    bits: Sequence[int] | Mapping[int, int],
    *,
    volume_cap: int | None = None,
    state_cap: int | None = None,
) -> ExhaustiveResult:
    """Propagate TERM sets through every step; skipped once a step-entry volume passes the cap."""
    settings = get_settings()
    volume_cap = volume_cap if volume_cap is not None else settings.exhaustive_volume_cap
    frontier: set[Configuration] = {Configuration.empty(program.alphabet)}
    seed_additions = encode_input(program, bits)
    max_entry = 0
    for index, additions in enumerate(program.steps):
        if index == 0:
            additions = additions + seed_additions
        entries = {config + additions for config in frontier}
        max_entry = max([max_entry, *(entry.volume for entry in entries)])
        if max_entry > volume_cap:
            return ExhaustiveResult(frozenset(frontier), False, max_entry)
        frontier = set()
        for entry in entries:
            frontier |= enumerate_terminals(entry, program.rules, state_cap)
    return ExhaustiveResult(frozenset(frontier), True, max_entry)


def all_terminal(configs: Iterable[Configuration], rules: Sequence[Rule]) -> bool:
    return all(is_terminal(config, rules) for config in configs)
