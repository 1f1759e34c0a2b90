import re

import pytest

from app.models.circuit import GateKind
from app.models.crn import Alphabet, Configuration
from app.models.program import OutputDecoding, Schedule, SchedulePolicy, StepProgram
from app.services import engine
from app.services.compilers import compile_circuit_exp, compile_formula
from app.services.crn import bind_rules, parse_rule
from app.services.engine import (
    all_terminal,
    decode_output,
    enumerate_program_terminals,
    enumerate_terminals,
    run_program,
    run_step,
)
from app.services.errors import DecodeError, StateCapExceededError, StepBudgetExceededError
from app.services.lowering import lower_gate

TRACE_LINE = re.compile(r"^step=\d+ rule=.+ -> .+ volume=\d+$")


def _gate_setup(kind, gate, fan_in, present):
    lowering = lower_gate(kind, gate, fan_in)
    names = [f"x[{w}]{p}" for w in fan_in for p in "TF"]
    names += [n for spec in lowering.rules for n in spec.species if n not in names]
    alphabet = Alphabet.of(dict.fromkeys(names))
    config = Configuration.of(alphabet, {name: 1 for name in present})
    return config, Configuration.of(alphabet, lowering.additions[0]), bind_rules(alphabet, lowering.rules)


def _rules(alphabet, *texts):
    return bind_rules(alphabet, [parse_rule(t) for t in texts])


@pytest.mark.parametrize("seed", range(10))
def test_and_step_keeps_only_the_false_edge(seed):
    config, additions, rules = _gate_setup(GateKind.AND, 4, [1, 2, 3], ["x[1]T", "x[2]T", "x[3]F"])
    terminal = run_step(config, additions, rules, Schedule(seed))
    assert terminal.sparse() == {"y[3->4]F": 1}


@pytest.mark.parametrize("seed", range(10))
def test_or_step_keeps_only_the_true_edge(seed):
    config, additions, rules = _gate_setup(GateKind.OR, 1, [1, 2], ["x[1]F", "x[2]T"])
    terminal = run_step(config, additions, rules, Schedule(seed))
    assert terminal.sparse() == {"y[2->1]T": 1}


def test_enumerate_terminals_finds_every_outcome():
    alphabet = Alphabet.of(["A", "B", "C"])
    rules = _rules(alphabet, "A + B -> .", "A + C -> .")
    start = Configuration.of(alphabet, {"A": 1, "B": 1, "C": 1})
    found = enumerate_terminals(start, rules)
    assert found == {
        Configuration.of(alphabet, {"C": 1}),
        Configuration.of(alphabet, {"B": 1}),
    }
    assert enumerate_terminals(Configuration.of(alphabet, {"A": 2, "B": 1}), rules) == {
        Configuration.of(alphabet, {"A": 1})
    }
    assert all_terminal(found, rules)


def test_enumerate_terminals_on_a_deterministic_gate_step():
    config, additions, rules = _gate_setup(GateKind.AND, 4, [1, 2, 3], ["x[1]T", "x[2]T", "x[3]F"])
    found = enumerate_terminals(config + additions, rules)
    assert [c.sparse() for c in found] == [{"y[3->4]F": 1}]


def test_state_cap_aborts_large_enumerations():
    alphabet = Alphabet.of(["A", "B", "C"])
    rules = _rules(alphabet, "A + B -> .", "A + C -> .", "B + C -> .")
    start = Configuration.of(alphabet, {"A": 10, "B": 10, "C": 10})
    with pytest.raises(StateCapExceededError):
        enumerate_terminals(start, rules, state_cap=5)


def test_non_void_rules_respect_the_budget():
    alphabet = Alphabet.of(["A"])
    rules = _rules(alphabet, "A -> 2 A")
    start = Configuration.of(alphabet, {"A": 1})
    with pytest.raises(StepBudgetExceededError):
        run_step(start, Configuration.empty(alphabet), rules, budget=50)


def test_decode_output_reports_ambiguous_and_missing():
    alphabet = Alphabet.of(["y[7]F", "y[7]T"])
    program = StepProgram("p", alphabet, (), (), (), (OutputDecoding(7, "y[7]F", "y[7]T"),))
    assert decode_output(Configuration.of(alphabet, {"y[7]F": 1}), program) == (0,)
    assert decode_output(Configuration.of(alphabet, {"y[7]T": 2}), program) == (1,)
    with pytest.raises(DecodeError) as exc:
        decode_output(Configuration.of(alphabet, {"y[7]F": 1, "y[7]T": 1}), program)
    assert exc.value.kind == DecodeError.AMBIGUOUS
    assert str(exc.value) == "AMBIGUOUS(7)"
    with pytest.raises(DecodeError) as exc:
        decode_output(Configuration.empty(alphabet), program)
    assert (exc.value.kind, exc.value.output) == (DecodeError.MISSING, 7)


def test_run_program_on_the_and_or_formula(formula):
    program = compile_formula(formula).program
    result = run_program(program, (1, 0, 0, 1))
    assert result.decoded == (0,)
    assert result.decode_error is None
    assert result.step_count == 5
    assert len(result.per_step_terminal) == 5
    assert result.final == result.per_step_terminal[-1]
    assert result.peak_volume >= result.final.volume
    assert all_terminal(result.per_step_terminal, program.rules)


def test_runs_are_deterministic_per_seed(fanout_and):
    program = compile_circuit_exp(fanout_and).program
    first = run_program(program, (1, 1), Schedule(7), trace=True)
    second = run_program(program, (1, 1), Schedule(7), trace=True)
    assert first == second
    assert first.trace
    assert all(TRACE_LINE.match(line) for line in first.trace)


def test_enumerate_program_terminals_matches_evaluation(sample):
    circuit = sample("single_and.net")
    program = compile_formula(circuit).program
    for bits, expected in [((0, 0), (0,)), ((0, 1), (0,)), ((1, 0), (0,)), ((1, 1), (1,))]:
        found = enumerate_program_terminals(program, bits, volume_cap=14)
        assert found.complete
        assert {decode_output(t, program) for t in found.terminals} == {expected}


def test_enumerate_program_terminals_stops_at_the_volume_cap(formula):
    program = compile_formula(formula).program
    found = enumerate_program_terminals(program, (1, 1, 1, 1), volume_cap=3)
    assert not found.complete
    assert found.max_entry_volume > 3


def test_schedule_policy_picks_the_rule_chooser(fanout_and, monkeypatch):
    program = compile_circuit_exp(fanout_and).program
    assert Schedule(3).policy is SchedulePolicy.RANDOM_MAXIMAL
    first_active = lambda rng, active: active.items[0]  # noqa: E731
    monkeypatch.setitem(engine.CHOOSERS, SchedulePolicy.RANDOM_MAXIMAL, first_active)
    first = run_program(program, (1, 1), Schedule(1), trace=True)
    second = run_program(program, (1, 1), Schedule(2), trace=True)
    assert first.trace == second.trace
    assert first.decoded == (1, 1)
