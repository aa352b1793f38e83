"""Malformed programs and the one diagnostic each must produce."""

from pathlib import Path

HERE = Path(__file__).parent

# file -> (line, col, phase, message fragment, exit code)
EXPECTED = {
    "arity.far": (5, 7, "sema", "DERIV1 takes 2 arguments, got 1", 2),
    "badchar.far": (2, 11, "lex", "invalid character '@'", 2),
    "bounds.far": (4, 5, "runtime", "A(4) is out of bounds", 3),
    "closure_arity.far": (8, 11, "runtime", "TWO takes 2 arguments, got 1", 3),
    "cot_in_adf.far": (3, 7, "parse", "COTANGENT spec in a forward (ADF) block", 2),
    "divzero.far": (3, 3, "runtime", "division by exact zero", 3),
    "implied_capture.far": (6, 28, "sema", "implied-DO variable I would overwrite", 2),
    "mismatch.far": (5, 7, "parse", "ADF block opened at line 3 is closed by END ADR", 2),
    "never_used.far": (6, 15, "sema", "Q is never used in the ADF block opened at line 4", 2),
    "no_closing.far": (5, 7, "parse", "END ADF needs a closing spec list", 2),
    "read_before.far": (2, 7, "sema", "X is read before it is assigned", 2),
    "return_in_block.far": (4, 5, "sema", "RETURN inside an ADF block", 2),
    "sub_as_fn.far": (5, 7, "sema", "S is a SUBROUTINE", 2),
    "tangent_body.far": (4, 9, "sema", "may only appear in ADF/ADR spec lists", 2),
    "unresolved.far": (3, 11, "sema", "unresolved name Z", 2),
}


def path(name: str) -> Path:
    return HERE / name
