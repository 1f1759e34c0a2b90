import itertools

import pytest

from app.models.crn import RuleFamily, RuleSpec
from app.models.program import Backend, Schedule
from app.services.circuits import evaluate
from app.services.compilers import (
    check_discipline,
    compile_circuit,
    compile_circuit_catalyst,
    compile_circuit_exp,
    compile_formula,
    encode_input,
)
from app.services.crn import classify_rule, format_rule
from app.services.engine import run_program
from app.services.errors import CompilationError, DemandOverflowError, EncodingError
from app.services.netlist import load_circuit, netlist_paths, parse_circuit
from app.services.programs import format_program

FORMULA_SAMPLES = ["and_or_formula.net", "single_and.net", "single_maj.net", "single_not.net"]


def test_and_or_formula_step_layout(formula):
    program = compile_formula(formula).program
    steps = [step.sparse() for step in program.steps]
    assert steps[0] == {f"x[{w}]{p}": 1 for w in (1, 2, 3, 4) for p in "TF"}
    assert steps[1] == {
        "y[5]T": 1,
        "y[1->5]F": 1,
        "y[2->5]F": 1,
        "y[6]T": 1,
        "y[3->6]F": 1,
        "y[4->6]F": 1,
    }
    assert steps[2] == {f"x[{w}]{p}": 1 for w in (5, 6) for p in "TF"}
    assert steps[3] == {"y[7]F": 1, "y[5->7]T": 1, "y[6->7]T": 1}
    assert steps[4] == {"x[7]T": 1, "x[7]F": 1}
    assert [(o.gate_id, o.zero, o.one) for o in program.outputs] == [(7, "x[7]F", "x[7]T")]
    assert run_program(program, (1, 0, 0, 1)).decoded == (0,)


def test_step_counts_per_gate_kind(sample):
    assert compile_formula(sample("single_and.net")).program.step_count == 3
    assert compile_formula(sample("single_not.net")).program.step_count == 3
    assert compile_formula(sample("single_maj.net")).program.step_count == 5


def test_input_encoding_picks_one_polarity(sample, binary_chain):
    program = compile_formula(sample("single_and.net")).program
    assert encode_input(program, (1, 0)).sparse() == {"y[1]T": 1, "y[2]F": 1}
    assert encode_input(program, {1: 0, 2: 1}).sparse() == {"y[1]F": 1, "y[2]T": 1}
    with pytest.raises(EncodingError):
        encode_input(program, (1,))
    with pytest.raises(EncodingError):
        encode_input(program, (1, 3))
    chain = compile_circuit_exp(binary_chain).program
    assert encode_input(chain, (1,)).sparse() == {"y[1]T": 8}


def test_formula_backend_rejects_fan_out(fanout_and):
    with pytest.raises(CompilationError, match="not a formula"):
        compile_formula(fanout_and)


def test_exp_backend_equals_formula_backend_on_formulas(sample):
    for name in FORMULA_SAMPLES:
        circuit = sample(name)
        assert compile_formula(circuit).program == compile_circuit_exp(circuit).program
        assert format_program(compile_formula(circuit).program) == format_program(
            compile_circuit_exp(circuit).program
        )


def test_exp_backend_scales_copies_with_demand(fanout_and):
    program = compile_circuit_exp(fanout_and).program
    assert encode_input(program, (1, 0)).sparse() == {"y[3]T": 2, "y[2]F": 2}
    result = run_program(program, (1, 0))
    gate_step = result.per_step_terminal[1].sparse()
    assert gate_step == {"y[2->1]F": 2}
    assert result.decoded == (0, 0)


@pytest.mark.parametrize("backend", [Backend.FORMULA, Backend.EXP])
def test_void_backends_only_emit_true_void_pairs(sample, backend):
    for name in FORMULA_SAMPLES:
        program = compile_circuit(sample(name), backend).program
        for rule in program.rules:
            kind = classify_rule(rule)
            assert (kind.size, kind.family) == ((2, 0), RuleFamily.TRUE_VOID)


def test_catalyst_rules_are_void_pairs_or_catalytic(samples_dir):
    for path in netlist_paths([samples_dir]):
        program = compile_circuit_catalyst(load_circuit(path)).program
        for rule in program.rules:
            kind = classify_rule(rule)
            assert (kind.size, kind.family) in {
                ((2, 0), RuleFamily.TRUE_VOID),
                ((2, 1), RuleFamily.CATALYTIC_VOID),
            }


def test_compiled_programs_keep_step_discipline(samples_dir):
    for path in netlist_paths([samples_dir]):
        circuit = load_circuit(path)
        backends = [Backend.EXP, Backend.CATALYST]
        if path.name in FORMULA_SAMPLES:
            backends.append(Backend.FORMULA)
        for backend in backends:
            compilation = compile_circuit(circuit, backend)
            assert check_discipline(compilation) == []
            assert compilation.report.within_bounds(), (path.name, backend)


def test_completion_steps_increase_along_wires(fanout_and):
    compilation = compile_circuit_exp(fanout_and)
    completion = compilation.report.completion_step
    for wire in compilation.circuit.wires:
        if not wire.is_output:
            assert completion[wire.producer] < completion[wire.consumer]


def test_catalyst_checkpoints_hold_only_the_next_level_wires(fanout_and):
    compilation = compile_circuit_catalyst(fanout_and)
    report = compilation.report
    assert report.checkpoints == (4, 10, 16)
    assert report.predicted["resident_volume"] == 2
    result = run_program(compilation.program, (1, 0))
    assert result.per_step_terminal[4].sparse() == {"x[3]F": 1, "x[4]T": 1}
    assert result.per_step_terminal[10].sparse() == {"x[1]F": 1, "x[2]F": 1}
    assert result.decoded == (0, 0)


def test_catalyst_keeps_a_constant_input_multiplicity(binary_chain):
    program = compile_circuit_catalyst(binary_chain).program
    assert encode_input(program, (1,)).sparse() == {"y[1]T": 1}
    for seed in range(5):
        assert run_program(program, (1,), Schedule(seed)).decoded == (1,)


def test_every_backend_agrees_with_evaluation(samples_dir):
    for path in netlist_paths([samples_dir]):
        circuit = load_circuit(path)
        backends = [Backend.EXP, Backend.CATALYST]
        if path.name in FORMULA_SAMPLES:
            backends.append(Backend.FORMULA)
        for backend in backends:
            program = compile_circuit(circuit, backend).program
            for bits in itertools.product((0, 1), repeat=len(circuit.input_gates)):
                for seed in range(3):
                    result = run_program(program, bits, Schedule(seed))
                    assert result.decoded == evaluate(circuit, bits), (path.name, backend, bits)


def test_levels_are_buffered_before_lowering():
    circuit = parse_circuit("gate 1 INPUT\ngate 2 INPUT\ngate 3 AND 1 2\ngate 4 OR 3 1\noutputs 4\n")
    compilation = compile_circuit_exp(circuit)
    assert compilation.report.buffers_inserted == 1
    for bits in itertools.product((0, 1), repeat=2):
        assert run_program(compilation.program, bits).decoded == evaluate(circuit, bits)


def test_demand_overflow_is_reported(fanout_and, override_settings):
    override_settings(max_count=1)
    with pytest.raises(DemandOverflowError) as exc:
        compile_circuit_exp(fanout_and)
    assert exc.value.demand == 2
    assert exc.value.capacity == 1
    # constant multiplicity never overflows
    compile_circuit_catalyst(fanout_and)


def test_catalyst_registers_each_deleter_pair_rule_once(sample, fanout_and):
    single_not = sample("single_not.net")
    compilation = compile_circuit_catalyst(single_not)
    assert compilation.rule_steps[RuleSpec.void("dx", "dx")] == 1
    assert compilation.rule_steps[RuleSpec.void("dy", "dy")] == 4
    for circuit in (single_not, fanout_and):
        program = compile_circuit_catalyst(circuit).program
        texts = [format_rule(rule) for rule in program.rules]
        assert texts.count("2 dx -> .") == 1
        assert texts.count("2 dy -> .") == 1
        for bits in itertools.product((0, 1), repeat=len(circuit.input_gates)):
            result = run_program(program, bits)
            assert result.decoded == evaluate(circuit, bits)
            assert result.final.count("dx") == result.final.count("dy") == 0
