from __future__ import annotations

import re
import subprocess
import sys

import pytest

from conftest import CORPUS, corpus_programs
from knotlang.cli import EXIT_FUEL, EXIT_OK, EXIT_PARSE, EXIT_TYPE, EXIT_USAGE, main
from knotlang.sorts import _ref_bump_disabled
from knotlang.syntax import parse_target

MODES = ["unrestricted", "full-ground", "sorted"]


@pytest.fixture
def in_corpus(monkeypatch):
    monkeypatch.chdir(CORPUS)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("name", corpus_programs())
def test_check_matches_golden_verdicts(in_corpus, capsys, name, mode):
    golden = (CORPUS / f"{name[:-4]}.{mode}.expected").read_text()
    code, out, err = run(capsys, "check", name, f"--mode={mode}")
    assert f"exit {code}\n{out}{err}" == golden


def test_check_knot(in_corpus, capsys):
    assert run(capsys, "check", "knot.src", "--mode=unrestricted") == (EXIT_OK, "Nat\n", "")
    code, out, err = run(capsys, "check", "knot.src", "--mode=sorted")
    assert code == EXIT_TYPE and "SortMismatch" in err and err.startswith("knot.src:4:1:")


def test_default_mode_is_sorted(in_corpus, capsys):
    assert run(capsys, "check", "id.src")[1] == "Nat ->[0] Nat :: Type 0\n"


def test_check_empty_is_a_parse_error(in_corpus, capsys):
    assert run(capsys, "check", "empty.src")[0] == EXIT_PARSE


def test_compile_id(in_corpus, capsys, tmp_path):
    out_file = tmp_path / "id.target"
    code, out, _ = run(capsys, "compile", "id.src", "--mode=sorted", f"--out={out_file}")
    assert code == EXIT_OK
    assert out_file.read_text() == (CORPUS / "id.sorted.target").read_text()
    assert parse_target(out_file.read_text()).type.level == 0


def test_compile_knot(in_corpus, capsys):
    code, out, _ = run(capsys, "compile", "knot.src", "--mode=unrestricted")
    assert code == EXIT_OK
    assert out == (CORPUS / "knot.unrestricted.target").read_text()
    assert len(re.findall(r"\bpack <", out)) == 2 and out.count(":=") == 1
    assert run(capsys, "compile", "knot.src", "--mode=sorted")[0] == EXIT_TYPE
    assert run(capsys, "compile", "knot.src", "--mode=full-ground")[0] == EXIT_TYPE


def test_run_knot_exhausts_fuel(in_corpus, capsys):
    code, out, _ = run(capsys, "run", "knot.src", "--mode=unrestricted", "--fuel=10000")
    assert code == EXIT_FUEL
    assert out == "FUEL EXHAUSTED after 10000 steps\n"


def test_run_programs(in_corpus, capsys):
    code, out, err = run(capsys, "run", "knot_nobackpatch.src", "--mode=sorted")
    assert (code, out, err) == (EXIT_OK, "0\n", "(7 steps)\n")
    assert run(capsys, "run", "five.src")[:2] == (EXIT_OK, "5\n")
    assert run(capsys, "run", "five.src", "--target")[:2] == (EXIT_OK, "5\n")


def test_run_target_knot(in_corpus, capsys):
    assert run(capsys, "run", "knot.src", "--mode=unrestricted", "--target")[0] == EXIT_FUEL
    assert run(capsys, "run", "knot.src", "--mode=sorted", "--target")[0] == EXIT_TYPE


def test_run_trace(in_corpus, capsys):
    code, out, _ = run(capsys, "run", "five.src", "--trace=5")
    assert out == "1\tbeta\t0\t-\n5\n"
    code, out, _ = run(capsys, "run", "knot.src", "--mode=unrestricted", "--trace=7", "--fuel=50")
    lines = out.splitlines()
    assert code == EXIT_FUEL and len(lines) == 8
    assert lines[4] == "5\tassign\t1\t0"


def test_fuel_environment_variable(in_corpus, capsys, monkeypatch):
    monkeypatch.setenv("KNOTLANG_FUEL", "123")
    assert run(capsys, "run", "knot.src", "--mode=unrestricted")[1] == "FUEL EXHAUSTED after 123 steps\n"
    monkeypatch.setenv("KNOTLANG_FUEL", "lots")
    assert run(capsys, "run", "knot.src", "--mode=unrestricted")[0] == EXIT_USAGE


@pytest.mark.parametrize(
    "argv",
    [[], ["frobnicate"], ["check"], ["check", "knot.src", "--mode=lax"], ["check", "missing.src"],
     ["run", "five.src", "--fuel=0"]],
)
def test_usage_errors(in_corpus, capsys, argv):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(main(argv))
    assert info.value.code == EXIT_USAGE


def test_demo_verifies_every_verdict(capsys):
    code, out, _ = run(capsys, "demo")
    assert code == EXIT_OK
    assert out.count("[ok]") == 6 and "MISMATCH" not in out
    assert "6/6 expected verdicts" in out


def test_demo_is_deterministic(capsys):
    assert run(capsys, "demo") == run(capsys, "demo")


def test_demo_fails_without_the_ref_bump(capsys):
    with _ref_bump_disabled():
        code, out, _ = run(capsys, "demo")
    assert code == EXIT_TYPE
    assert "[MISMATCH] sorted: r := f" in out


def test_demo_help(capsys):
    with pytest.raises(SystemExit) as info:
        main(["demo", "--help"])
    assert info.value.code == 0
    assert "usage: knotlang demo" in capsys.readouterr().out


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "knotlang.cli", "check", str(CORPUS / "knot.src"),
                           "--mode=unrestricted"], capture_output=True, text=True)
    assert (proc.returncode, proc.stdout) == (0, "Nat\n")
