import json

import pytest

from app.cli import main
from app.services.programs import load_program


@pytest.fixture
def compiled(tmp_path, samples_dir):
    out = tmp_path / "formula.prog"
    assert main(["compile", str(samples_dir / "and_or_formula.net"), "--out", str(out)]) == 0
    return out


def test_compile_writes_program_and_report(compiled):
    assert load_program(compiled).step_count == 5
    report = compiled.with_name(compiled.name + ".report").read_text()
    assert "step_count=5" in report.splitlines()


def test_compile_json_report_to_stdout(samples_dir, capsys):
    code = main(["compile", str(samples_dir / "and_fanout2.net"), "--backend", "exp", "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["report"]["demand"]["3"] == 2
    assert payload["program"].startswith("program and_fanout2")


def test_missing_file_is_a_usage_error(tmp_path, capsys):
    assert main(["compile", str(tmp_path / "nope.net")]) == 2
    assert "cannot open" in capsys.readouterr().err


def test_formula_backend_refuses_fan_out(samples_dir, capsys):
    assert main(["compile", str(samples_dir / "and_fanout2.net")]) == 2
    assert "not a formula" in capsys.readouterr().err


def test_run_prints_decoded_output(compiled, capsys):
    capsys.readouterr()
    assert main(["run", str(compiled), "1001", "--seed", "3"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert "output: 0" in out
    assert any(line.startswith("peak_volume: ") for line in out)
    assert "steps: 5" in out


def test_run_trace_and_bad_input(compiled, capsys):
    capsys.readouterr()
    assert main(["run", str(compiled), "1111", "--trace"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("step=0 rule=")
    assert "output: 1" in out
    assert main(["run", str(compiled), "10"]) == 2
    assert main(["run", str(compiled), "10a1"]) == 2


def test_verify_passes_on_sample_formula(samples_dir, capsys):
    code = main(["verify", str(samples_dir / "and_or_formula.net"), "--seeds", "0-4"])
    assert code == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS and_or_formula backend=formula checked=80")
    assert out.rstrip().endswith("1/1 passed")


def test_verify_directory_with_several_backends(samples_dir, capsys):
    args = ["verify", str(samples_dir), "--backend", "exp", "--backend", "catalyst", "--seeds", "0-2"]
    assert main(args) == 0
    assert capsys.readouterr().out.rstrip().endswith("12/12 passed")


def test_verify_exhaustive_and_json(samples_dir, capsys):
    args = ["verify", str(samples_dir / "single_and.net"), "--seeds", "0", "--exhaustive", "--json"]
    assert main(args) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["ok"] is True
    assert payload["results"][0]["exhaustive_checked"] == 4


def test_verify_reports_counterexample_for_a_broken_program(tmp_path, samples_dir, capsys):
    circuit = samples_dir / "single_and.net"
    program = tmp_path / "and.prog"
    assert main(["compile", str(circuit), "--out", str(program)]) == 0
    program.write_text(program.read_text().replace("  x[1]F + y[3]T -> .\n", ""))
    capsys.readouterr()
    assert main(["verify", str(circuit), "--program", str(program), "--seeds", "0"]) == 1
    out = capsys.readouterr().out
    assert out.startswith("FAIL single_and")
    assert "counterexample: circuit=single_and input=01 seed=0" in out
    assert "error=MISSING(3)" in out


def test_verify_rejects_bad_input_mode(samples_dir):
    assert main(["verify", str(samples_dir / "single_and.net"), "--inputs", "some"]) == 2
    assert main(["verify", str(samples_dir / "single_and.net"), "--inputs", "random:0"]) == 2


def test_lowerbound_table(capsys):
    assert main(["lowerbound", "--depth", "1-5"]) == 0
    out = capsys.readouterr().out.splitlines()
    rows = [line for line in out if line.rstrip().endswith("pass")]
    assert len(rows) == 5
    assert "flip x2 from 111 changes: y1" in out


def test_lowerbound_rejects_bad_completion():
    assert main(["lowerbound", "--depth", "1", "--completion", "001=111"]) == 2


def test_gen_corpus_is_reproducible(tmp_path, capsys):
    first, second = tmp_path / "a", tmp_path / "b"
    assert main(["gen-corpus", "--out", str(first), "--count", "3", "--seed", "7"]) == 0
    assert main(["gen-corpus", "--out", str(second), "--count", "3", "--seed", "7"]) == 0
    names = sorted(p.name for p in first.iterdir())
    assert names == ["gen_000.net", "gen_001.net", "gen_002.net"]
    for name in names:
        assert (first / name).read_text() == (second / name).read_text()


def test_unknown_command_exits_with_usage_code(capsys):
    assert main(["frobnicate"]) == 2
