import json
import subprocess
import sys

import pytest

from farfel.cli import main
from farfel.frontend import parse_source
from farfel.stdlib import CORPUS_DIR, MANIFEST
from malformed import EXPECTED, path as bad_path

ROOT_FAR = str(CORPUS_DIR / "root.far")


def cli(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out, err = capsys.readouterr()
    return code, out, err


def test_run_prints_values(capsys):
    code, out, err = cli(capsys, "run", ROOT_FAR)
    assert code == 0 and err == ""
    assert out.splitlines()[0] == "5"


def test_run_structured_is_json_lines(capsys):
    code, out, _ = cli(capsys, "run", ROOT_FAR, "--format", "structured")
    rows = [json.loads(line) for line in out.splitlines()]
    assert [r["name"] for r in rows] == ["R1", "R2", "R3"]
    assert float(rows[1]["decimal"]) == rows[1]["value"]


def test_set_overrides_a_program_variable(capsys, tmp_path):
    f = tmp_path / "p.far"
    f.write_text("PROGRAM P\nK = 1\nPRINT *, K*3\nEND\n")
    code, out, _ = cli(capsys, "run", str(f), "--set", "K=4")
    assert (code, out) == (0, "12\n")


def test_iters_pins_n(capsys, tmp_path):
    f = tmp_path / "p.far"
    f.write_text("PROGRAM P\nN = 1\nPRINT *, N\nEND\n")
    assert cli(capsys, "run", str(f), "--iters", "7")[1] == "7\n"


def test_set_of_unknown_variable_is_a_usage_error(capsys):
    code, _, err = cli(capsys, "run", ROOT_FAR, "--set", "NOPE=1")
    assert code == 64 and "NOPE" in err


def test_unknown_flag_is_a_usage_error(capsys):
    assert cli(capsys, "run", ROOT_FAR, "--bogus")[0] == 64


def test_missing_file_is_one_line(capsys, tmp_path):
    code, out, err = cli(capsys, "run", str(tmp_path / "none.far"))
    assert code == 2 and out == ""
    assert len(err.splitlines()) == 1 and "cannot read" in err


def test_dump_ast_round_trips(capsys):
    code, out, _ = cli(capsys, "dump-ast", ROOT_FAR)
    assert code == 0
    assert parse_source(out) == parse_source((CORPUS_DIR / "root.far").read_text())


def test_dump_tape(capsys, tmp_path):
    f = tmp_path / "t.far"
    f.write_text("PROGRAM P\nX = 3.0\nADR(COTANGENT(Y) = 1)\nY = X*X\n"
                 "END ADR(D = COTANGENT(X))\nEND\n")
    code, out, _ = cli(capsys, "dump-tape", str(f))
    assert code == 0
    assert out == "tape 1 (2 nodes)\n0 leaf - - 3\n1 * 0,0 3,3 9\n"


def test_verify_reports_failures(capsys, tmp_path):
    prog = tmp_path / "p.far"
    prog.write_text("PROGRAM P\nX = 2.0\nPRINT *, X\nEND\n")
    man = tmp_path / "m.manifest"
    man.write_text("entry = p\npath = p.far\nexpect = X 3.0 0 TRIVIAL\n")
    code, out, _ = cli(capsys, "verify", str(man))
    assert code == 4
    assert out.splitlines()[0].startswith("FAIL p.X")


@pytest.mark.slow
def test_verify_shipped_manifest(capsys):
    code, out, _ = cli(capsys, "verify", str(MANIFEST))
    assert code == 0
    assert all(line.startswith("PASS") for line in out.splitlines()[:-1])


def test_runs_are_deterministic(capsys):
    first = cli(capsys, "run", ROOT_FAR)
    assert cli(capsys, "run", ROOT_FAR) == first


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_malformed_programs(name, capsys):
    line, col, phase, fragment, status = EXPECTED[name]
    code, _, err = cli(capsys, "run", str(bad_path(name)))
    assert code == status
    (diag,) = err.splitlines()
    assert diag.startswith(f"{bad_path(name)}:{line}:{col}: {phase}: ")
    assert fragment in diag


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "farfel", "run", ROOT_FAR],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.startswith("5\n")
