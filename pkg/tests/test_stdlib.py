import functools
import math

import numpy as np
import pytest
from scipy import special

from farfel.api import Session, load, run_source
from farfel.diagnostics import DomainError
from farfel.frontend import parse_source
from farfel.interp import run_program
from farfel.stdlib import (
    LIB_DIR, VARIANTS, library_paths, library_unit, program_paths, read_program,
    swap_source,
)
from farfel.stdlib.manifest import (
    ManifestError, load_manifest, parse_manifest, printed_values, run_entry, verify_entry,
)

ENTRIES = {e.name: e for e in load_manifest()}
SLOW = {"eqlbrm", "eqlbrm_cubic"}
MODES = ["forward", "reverse"]


@functools.lru_cache(maxsize=None)
def checks(name, mode):
    return verify_entry(ENTRIES[name], mode)


def _params():
    for name in ENTRIES:
        marks = [pytest.mark.slow] if name in SLOW else []
        for mode in MODES:
            yield pytest.param(name, mode, marks=marks, id=f"{name}-{mode}")


@pytest.mark.parametrize("name, mode", list(_params()))
def test_manifest_goldens(name, mode):
    failed = [c.line() for c in checks(name, mode) if not c.ok]
    assert not failed, "\n".join(failed)


def test_every_program_has_a_manifest_entry():
    listed = {e.path.resolve() for e in ENTRIES.values()}
    assert {p.resolve() for p in program_paths()} <= listed


def test_manifest_parser_rejects_unknown_keys(tmp_path):
    with pytest.raises(ManifestError):
        parse_manifest("entry = a\npath = x.far\ncolour = red\n", tmp_path)


def test_library_copies_inside_programs_are_verbatim():
    lib = {}
    for p in library_paths():
        unit = library_unit(p.stem)
        lib.setdefault(unit.name, []).append(unit)
    for path in program_paths():
        for unit in parse_source(path.read_text()).units:
            if unit.name in lib:
                assert unit in lib[unit.name], (path.name, unit.name)


def test_variants_share_an_interface():
    for name, _ in VARIANTS["forward"].items():
        f = library_unit(VARIANTS["forward"][name])
        r = library_unit(VARIANTS["reverse"][name])
        assert (f.kind, f.name, f.params) == (r.kind, r.name, r.params)


def test_swap_source_changes_only_the_derivative_units():
    src = read_program("root")
    swapped = parse_source(swap_source(src, "reverse"))
    original = parse_source(src)
    for a, b in zip(original.units, swapped.units):
        assert (a == b) == (a.name != "DERIV1")


def test_gamma_density_alpha_derivative_against_finite_differences():
    src = (LIB_DIR / "gammadist.far").read_text()
    s = Session(src)

    def g(a):
        return 1.5 ** a * 1.3 ** (a - 1) * math.exp(-1.5 * 1.3) / special.gamma(a)

    h = 1e-5
    fd = (g(2.2 + h) - g(2.2 - h)) / (2 * h)
    assert s.call("GAMMADIST", 1.3, 2.2, 1.5) == pytest.approx(g(2.2), rel=1e-12)
    assert fd == pytest.approx(_alpha_derivative(1.3, 2.2, 1.5), rel=1e-7)


def _alpha_derivative(x, alpha, beta):
    src = (LIB_DIR / "gammadist.far").read_text() + """\
FUNCTION DA(X, ALPHA, BETA)
  ADF(TANGENT(ALPHA) = 1)
    G = GAMMADIST(X, ALPHA, BETA)
  END ADF(DA = TANGENT(G))
END
"""
    return Session(src).call("DA", x, alpha, beta)


def test_gamma_density_outside_support_is_a_domain_error():
    s = Session(read_program("gammadist"))
    with pytest.raises(DomainError):
        s.call("GAMMADIST", -1.0, 2.0, 1.0)
    with pytest.raises(DomainError):
        s.call("GAMMADIST", 1.0, 2.0, 0.0)


def test_line_search_with_zero_direction_fails_cleanly():
    src = read_program("linesearch").replace("XDIR(1) = 1.0", "XDIR(1) = 0.0")
    res = run_source(src)
    assert res.status == 3
    assert isinstance(res.error, DomainError)
    assert res.error.line > 0


def test_equilibrium_program_is_short():
    src = read_program("eqlbrm")
    head = src.split("\n\n")[0]
    assert len(head.splitlines()) <= 80


def _linear_equilibrium(ca):
    # first-order conditions of the two quadratic payoffs, solved directly
    m = np.array([[2 * 1.0, 0.5], [0.75, 2 * 1.0]])
    rhs = np.array([20.0 - ca, 20.0 - 4.0])
    return np.linalg.solve(m, rhs)


def test_linear_oracle_reproduces_the_golden_fractions():
    a, b = _linear_equilibrium(2.0)
    assert a == pytest.approx(224 / 29, abs=1e-12)
    assert b == pytest.approx(148 / 29, abs=1e-12)


@pytest.mark.slow
def test_equilibrium_nests_five_activations_deep():
    res = run_entry(ENTRIES["eqlbrm"], "forward")
    assert res.interpreter.engine.max_active >= 5


@pytest.mark.slow
def test_higher_cost_lowers_the_first_firm_quantity():
    bound = load(read_program("eqlbrm"))
    base = printed_values(run_program(bound, {"N": 25}))
    dear = printed_values(run_program(bound, {"N": 25, "CA": 3.0}))
    assert dear["ASTAR"] < base["ASTAR"]
    assert dear["ASTAR"] == pytest.approx(_linear_equilibrium(3.0)[0], abs=1e-6)


@pytest.mark.slow
def test_cubic_variant_with_zero_coefficient_matches_the_quadratic_game():
    quad = printed_values(run_entry(ENTRIES["eqlbrm"], "forward"))
    bound = load(read_program("eqlbrm_cubic"))
    cubic0 = printed_values(run_program(bound, {"N": 25, "CUBIC": 0.0}))
    for name in ["ASTAR", "BSTAR"]:
        assert abs(cubic0[name] - quad[name]) <= 1e-9
