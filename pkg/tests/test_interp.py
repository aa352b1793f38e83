import math

import pytest

from farfel import adcore as ad
from farfel.api import Session, load, run_source
from farfel.diagnostics import DomainError, FarRuntimeError
from farfel.interp import MAX_CALL_DEPTH, Array, Closure, format_value, run_program
from farfel.stdlib import CORPUS_DIR, LIB_DIR

DERIV1F = (LIB_DIR / "deriv1f.far").read_text()
DERIV1R = (LIB_DIR / "deriv1r.far").read_text()


def frames(interp):
    """Every frame reachable from the main frame and the closures it holds."""
    seen, todo, out = set(), [interp.main_frame], []
    while todo:
        fr = todo.pop()
        if fr is None or id(fr) in seen:
            continue
        seen.add(id(fr))
        out.append(fr)
        todo.append(fr.parent)
        for v in fr.vars.values():
            if isinstance(v, Closure):
                todo.append(v.env)
    return out


def assert_untagged(interp):
    for fr in frames(interp):
        for name, v in fr.vars.items():
            items = v if isinstance(v, Array) else [v]
            assert not any(ad.is_tagged(x) for x in items), name


def test_simple_print():
    assert run_source("PROGRAM P\nX = 1 + 1\nPRINT *, X\nEND\n").output == "2\n"


def test_phi_derivative_at_the_mean_and_one_sigma():
    src = (CORPUS_DIR / "phi.far").read_text()
    res = run_source(src)
    assert res.status == 0
    values = dict((r["name"], r["value"]) for r in res.records)
    assert values["PHIPRM"] == pytest.approx(-1 / math.sqrt(2 * math.pi), rel=1e-12)
    assert values["PHIPR1"] == pytest.approx(0.0, abs=1e-15)


def test_forward_block_on_identity():
    src = "PROGRAM P\nX = 3.0\nADF(TANGENT(X) = 1)\nY = X\nEND ADF(D = TANGENT(Y))\nPRINT *, D\nEND\n"
    assert run_source(src).output == "1\n"


def test_sequential_blocks_do_not_interfere():
    src = """\
PROGRAM P
  X = 2.0
  ADF(TANGENT(X) = 1)
    Y = X*X
  END ADF(D1 = TANGENT(Y))
  ADF(TANGENT(X) = 10)
    Z = X*X*X
  END ADF(D2 = TANGENT(Z))
  PRINT *, D1
  PRINT *, D2
  PRINT *, Y + Z
END
"""
    assert run_source(src).output == "4\n120\n12\n"


def test_reverse_zero_seed():
    src = "PROGRAM P\nX = 3.0\nADR(COTANGENT(Y) = 0)\nY = X*X\nEND ADR(D = COTANGENT(X))\nPRINT *, D\nEND\n"
    assert run_source(src).values() == [0.0]


def test_reverse_seed_may_depend_on_body_results():
    src = """\
PROGRAM P
  X = 3.0
  ADR(COTANGENT(Y) = Y)
    Y = X*X
  END ADR(D = COTANGENT(X))
  PRINT *, D
END
"""
    assert run_source(src).values() == [54.0]


def test_checkpoint_equals_monolithic():
    res = run_source((CORPUS_DIR / "checkpoint.far").read_text())
    v = {r["name"]: r["value"] for r in res.records}
    assert abs(v["DX1"] - v["DXM1"]) <= 1e-12
    assert abs(v["DX2"] - v["DXM2"]) <= 1e-12


@pytest.mark.parametrize("deriv", [DERIV1F, DERIV1R], ids=["forward", "reverse"])
def test_session_calls_deriv1(deriv):
    s = Session(deriv + "FUNCTION PHI(X)\nPHI = EXP(-X*X/2)/SQRT(2*3.141592653589793)\nEND\n")
    got = s.call("DERIV1", s.fn("PHI"), 1.0)
    assert got == pytest.approx(-math.exp(-0.5) / math.sqrt(2 * math.pi), rel=1e-12)
    assert s.engine.active == []


def test_identity_function():
    s = Session("FUNCTION F(X)\nF = X\nEND\n")
    assert s.call("F", 42) == 42


def test_nested_function_sees_caller_array_mutation():
    src = """\
PROGRAM P
  DIMENSION D(1)
  D(1) = 1.0
  FUNCTION ALONG(S)
    ALONG = S*D(1)
  END
  A = ALONG(2.0)
  D(1) = -3.0
  B = ALONG(2.0)
  PRINT *, A
  PRINT *, B
END
"""
    assert run_source(src).values() == [2.0, -6.0]


def test_closure_sees_later_updates():
    src = """\
PROGRAM P
  K = 1.0
  FUNCTION G(X)
    G = K*X
  END
  A = G(2.0)
  K = 5.0
  B = G(2.0)
  PRINT *, A
  PRINT *, B
END
"""
    assert run_source(src).values() == [2.0, 10.0]


def test_subprogram_argument_mutates_caller_array():
    src = """\
PROGRAM P
  DIMENSION V(2)
  V(1) = 1.0
  V(2) = 2.0
  CALL SCALE(V, 2, 3.0)
  PRINT *, V(1)
  PRINT *, V(2)
END
SUBROUTINE SCALE(A, N, C)
  DIMENSION A(N)
  DO I = 1, N
    A(I) = C*A(I)
  END DO
END
"""
    assert run_source(src).values() == [3.0, 6.0]


RECURSE = """\
PROGRAM P
  R = DOWN({n})
  PRINT *, R
END
FUNCTION DOWN(K)
  IF (K .LE. 1) THEN
    DOWN = 1
  ELSE
    DOWN = DOWN(K - 1)
  END IF
END
"""


def test_recursion_up_to_the_cap():
    res = run_source(RECURSE.format(n=MAX_CALL_DEPTH - 1))
    assert res.status == 0 and res.output == "1\n"


def test_recursion_beyond_the_cap_is_a_runtime_error():
    res = run_source(RECURSE.format(n=MAX_CALL_DEPTH + 1))
    assert res.status == 3
    assert "recursion depth exceeds 10000" in res.error.message


@pytest.mark.parametrize("name", ["nesting", "checkpoint", "grad", "argmax", "phi"])
def test_no_tags_survive_in_frames(name):
    res = run_source((CORPUS_DIR / f"{name}.far").read_text())
    assert res.status == 0
    interp = res.interpreter
    assert interp.engine.active == []
    assert_untagged(interp)


def test_tags_are_stripped_from_arrays_written_in_a_block():
    src = """\
PROGRAM P
  DIMENSION W(2)
  X = 2.0
  ADF(TANGENT(X) = 1)
    W(1) = X*X
    W(2) = 3.0
  END ADF(D = TANGENT(W(1)))
  PRINT *, D
END
"""
    res = run_source(src)
    assert res.values() == [4.0]
    assert_untagged(res.interpreter)


def test_array_bounds_are_checked():
    res = run_source("PROGRAM P\nDIMENSION A(2)\nA(3) = 1.0\nEND\n")
    assert res.status == 3
    assert (res.error.line, res.error.col) == (3, 1)
    assert "out of bounds" in res.error.message


def test_domain_error_is_located():
    res = run_source("PROGRAM P\nX = -1.0\nY = LOG(X)\nEND\n")
    assert isinstance(res.error, DomainError)
    assert res.error.line == 3


def test_print_format():
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(3) == "3"
    assert format_value(True) == "T"
    t = ad.Engine().fresh_tag(ad.FORWARD)
    assert format_value(ad.ForwardDual(t, 2.5, 1.0)) == "2.5"


def test_overrides_pin_program_variables():
    src = "PROGRAM P\nN = 3\nX = N*2\nPRINT *, X\nEND\n"
    assert run_program(load(src), {"N": 10}).output == "20\n"


def test_pinned_variable_cannot_be_reassigned_later():
    src = "PROGRAM P\nN = 3\nN = N + 1\nPRINT *, N\nEND\n"
    assert run_program(load(src), {"N": 10}).output == "10\n"


def test_structured_records():
    res = run_source("PROGRAM P\nX = 0.5\nPRINT *, X\nEND\n")
    assert res.records == [{"name": "X", "value": 0.5, "decimal": "0.5"}]


def test_forward_over_reverse_gradient():
    src = """\
PROGRAM P
  X = 2.0
  ADF(TANGENT(X) = 1)
    ADR(COTANGENT(Y) = 1)
      Y = X*X
    END ADR(G = COTANGENT(X))
  END ADF(H = TANGENT(G))
  PRINT *, H
END
"""
    assert run_source(src).values() == [2.0]


def test_runtime_errors_are_farfel_errors():
    res = run_source("PROGRAM P\nX = 0\nY = 1/X\nEND\n")
    assert isinstance(res.error, FarRuntimeError) and res.status == 3
