"""Acceptance criteria, one test each; every test records a PASS/FAIL line."""

import functools
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from farfel.api import Session
from farfel.cli import main
from farfel.frontend import format_program, parse_source
from farfel.stdlib import CORPUS_DIR, LIB_DIR, corpus_paths, read_program, swap_source
from farfel.stdlib.manifest import load_manifest, printed_values, run_entry
from malformed import EXPECTED, path as bad_path

ENTRIES = {e.name: e for e in load_manifest()}
FUNCTIONS = ["GDENS", "GSHAPE", "GAUSS", "POLY", "POLY5", "COMPOS", "SOFTPL", "TRIG", "LGAM"]
POINTS = np.linspace(0.3, 1.4, 10)


@functools.lru_cache(maxsize=None)
def corpus_run(name, mode):
    return printed_values(run_entry(ENTRIES[name], mode))


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


def test_criterion_1_derivative_oracles(verdict):
    start = time.perf_counter()
    src = read_program("functions")
    fwd = Session(swap_source(src, "forward"))
    rev = Session(swap_source(src, "reverse"))
    worst_fd = worst_mode = 0.0
    h = 1e-5
    for name in FUNCTIONS:
        for x in map(float, POINTS):
            df = fwd.call("DERIV1", fwd.fn(name), x)
            dr = rev.call("DERIV1", rev.fn(name), x)
            fd = (fwd.call(name, x + h) - fwd.call(name, x - h)) / (2 * h)
            worst_fd = max(worst_fd, rel(df, fd), rel(dr, fd))
            worst_mode = max(worst_mode, rel(df, dr))
    elapsed = time.perf_counter() - start
    ok = worst_fd <= 1e-5 and worst_mode <= 1e-10 and elapsed < 5
    verdict(1, ok, f"{len(FUNCTIONS)} functions x {len(POINTS)} points, "
                   f"max rel err vs FD {worst_fd:.2e}, forward vs reverse {worst_mode:.2e}, "
                   f"{elapsed:.2f} s")
    assert ok


@pytest.mark.slow
def test_criterion_2_mode_swap(verdict):
    worst, where = 0.0, ""
    for name in ENTRIES:
        f, r = corpus_run(name, "forward"), corpus_run(name, "reverse")
        assert f.keys() == r.keys()
        for k in f:
            d = abs(f[k] - r[k])
            if d >= worst:
                worst, where = d, f"{name}.{k}"
    ok = worst <= 1e-9
    verdict(2, ok, f"{len(ENTRIES)} corpus programs, largest forward/reverse "
                   f"difference {worst:.2e} ({where})")
    assert ok


def test_criterion_3_nesting(verdict):
    out = printed_values(run_entry(ENTRIES["nesting"]))
    ok = (out["PC"] == 1.0 and abs(out["RR"] - 12) <= 1e-9
          and abs(out["FR"] - 12) <= 1e-9 and abs(out["RF"] - 12) <= 1e-9)
    verdict(3, ok, f"perturbation confusion {out['PC']!r}, reverse-over-reverse {out['RR']!r}, "
                   f"forward-over-reverse {out['FR']!r}")
    assert ok


AFFINE = [(1.0, -5.0, 0.0), (2.0, -3.0, 0.0), (4.0, 1.0, 1.25), (-0.5, 3.0, 2.0),
          (0.25, 0.75, -8.0)]


def test_criterion_4_newton(verdict):
    r2 = {m: corpus_run("root", m)["R2"] for m in ("forward", "reverse")}
    sqrt_ok = all(abs(v - math.sqrt(2)) <= 1e-10 for v in r2.values())
    bits_ok = True
    lib = (LIB_DIR / "root.far").read_text()
    for mode in ("forward", "reverse"):
        deriv = (LIB_DIR / f"deriv1{mode[0]}.far").read_text()
        for a, b, x0 in AFFINE:
            s = Session(lib + deriv + f"FUNCTION AFF(X)\nAFF = {a!r}*X + {b!r}\nEND\n")
            got = s.call("ROOT", s.fn("AFF"), x0, 1)
            bits_ok &= got == -b / a
    ok = sqrt_ok and bits_ok
    verdict(4, ok, f"ROOT(X**2-2) = {r2['forward']!r} (forward), {r2['reverse']!r} (reverse); "
                   f"{len(AFFINE)} affine functions exact after one step in both modes: {bits_ok}")
    assert ok


@pytest.mark.slow
def test_criterion_5_equilibrium(verdict):
    out = corpus_run("eqlbrm", "forward")
    golden_ok = (abs(out["ASTAR"] - 224 / 29) <= 1e-6 and abs(out["BSTAR"] - 148 / 29) <= 1e-6
                 and abs(out["FOCA"]) < 1e-6 and abs(out["FOCB"]) < 1e-6)
    cmd = [sys.executable, "-m", "farfel", "run", str(CORPUS_DIR / "eqlbrm.far"),
           "--iters", "1000", "--format", "structured"]
    start = time.perf_counter()
    try:
        proc = subprocess.run(cmd, capture_output=True, text=True, timeout=60)
    except subprocess.TimeoutExpired:
        big = "did not finish within 60 s"
        big_ok = False
    else:
        vals = {r["name"]: r["value"] for r in map(json.loads, proc.stdout.splitlines())}
        big_ok = proc.returncode == 0 and all(abs(vals[k] - out[k]) <= 1e-9 for k in out)
        big = f"finished in {time.perf_counter() - start:.1f} s, identical: {big_ok}"
    ok = golden_ok and big_ok
    verdict(5, ok, f"N=25 ASTAR {out['ASTAR']!r} BSTAR {out['BSTAR']!r} "
                   f"residuals {abs(out['FOCA']):.1e}/{abs(out['FOCB']):.1e} "
                   f"(ok: {golden_ok}); --iters 1000 {big}")
    assert ok


def test_criterion_6_checkpoint(verdict):
    out = corpus_run("checkpoint", None)
    diff = max(abs(out["DX1"] - out["DXM1"]), abs(out["DX2"] - out["DXM2"]))
    closed = max(abs(out["DX1"] - math.sin(0.6)), abs(out["DX2"] - math.sin(2.2)))
    ok = diff <= 1e-12 and closed <= 1e-12
    verdict(6, ok, f"checkpointed vs monolithic dX differ by {diff:.1e}, "
                   f"vs 2 sin cos by {closed:.1e}")
    assert ok


def test_criterion_7_diagnostics(verdict, capsys):
    good = 0
    for name, (line, col, phase, fragment, status) in sorted(EXPECTED.items()):
        try:
            code = main(["run", str(bad_path(name))])
        except SystemExit as exc:
            code = exc.code
        _, err = capsys.readouterr()
        lines = err.splitlines()
        if (code == status and len(lines) == 1 and fragment in lines[0]
                and lines[0].startswith(f"{bad_path(name)}:{line}:{col}: {phase}: ")):
            good += 1
    ok = good == len(EXPECTED) >= 10
    verdict(7, ok, f"{good}/{len(EXPECTED)} malformed programs give one located diagnostic "
                   "and the right exit code")
    assert ok


def test_criterion_8_round_trip(verdict):
    paths = corpus_paths()
    same = sum(parse_source(format_program(parse_source(p.read_text())))
               == parse_source(p.read_text()) for p in paths)
    ok = same == len(paths)
    verdict(8, ok, f"{same}/{len(paths)} corpus files survive parse, print, parse")
    assert ok
