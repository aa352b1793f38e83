"""AST node types.

Positions (`line`, `col`) are excluded from equality so that two parses of
equivalent text compare equal regardless of layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

FORWARD = "FORWARD"
REVERSE = "REVERSE"


def _pos():
    return field(default=0, compare=False, repr=False)


# -- expressions -----------------------------------------------------------

@dataclass(eq=True)
class Num:
    value: Union[int, float]
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class Var:
    name: str
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class ArrayRef:
    name: str
    index: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class Unary:
    op: str  # NEG or .NOT.
    operand: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class Binary:
    op: str
    lhs: "Expr"
    rhs: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class Call:
    name: str
    args: list
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class Deriv:
    """TANGENT(target) or COTANGENT(target); legal only in AD spec lists."""

    kind: str
    target: Union[Var, ArrayRef]
    line: int = _pos()
    col: int = _pos()


Expr = Union[Num, Var, ArrayRef, Unary, Binary, Call, Deriv]


# -- AD blocks -------------------------------------------------------------

@dataclass(eq=True)
class SpecBinding:
    lhs: "Expr"
    rhs: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class ImpliedDo:
    var: str
    lo: "Expr"
    hi: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class AdSpec:
    bindings: list
    implied_do: Optional[ImpliedDo] = None
    line: int = _pos()
    col: int = _pos()


# -- statements ------------------------------------------------------------

@dataclass(eq=True)
class Assign:
    target: Union[Var, ArrayRef]
    expr: "Expr"
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class CallStmt:
    name: str
    args: list
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class If:
    cond: "Expr"
    then: list
    orelse: list
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class DoLoop:
    var: str
    lo: "Expr"
    hi: "Expr"
    step: Optional["Expr"]
    body: list
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class Print:
    items: list
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class Return:
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class Dimension:
    decls: list  # [(name, extent Expr)]
    line: int = _pos()
    col: int = _pos()


@dataclass(eq=True)
class AdBlock:
    mode: str  # FORWARD (ADF) or REVERSE (ADR)
    opening: list  # [AdSpec]
    body: list
    closing: list  # [AdSpec]
    line: int = _pos()
    col: int = _pos()

    @property
    def keyword(self) -> str:
        return "ADF" if self.mode == FORWARD else "ADR"


@dataclass(eq=True)
class Subprogram:
    kind: str  # FUNCTION, SUBROUTINE or PROGRAM
    name: str
    params: list
    body: list
    line: int = _pos()
    col: int = _pos()

    @property
    def dimension_decls(self) -> list:
        return [d for s in self.body if isinstance(s, Dimension) for d in s.decls]

    @property
    def nested(self) -> list:
        return [s.sub for s in self.body if isinstance(s, SubprogramDef)]


@dataclass(eq=True)
class SubprogramDef:
    sub: Subprogram
    line: int = _pos()
    col: int = _pos()


Stmt = Union[Assign, CallStmt, If, DoLoop, Print, Return, Dimension, AdBlock, SubprogramDef]


@dataclass(eq=True)
class Program:
    units: list

    def unit(self, name: str) -> Subprogram:
        for u in self.units:
            if u.name == name:
                return u
        raise KeyError(name)

    @property
    def main(self) -> Optional[Subprogram]:
        for u in self.units:
            if u.kind == "PROGRAM":
                return u
        return None


def walk_exprs(expr):
    """Yield `expr` and all sub-expressions, pre-order."""
    stack = [expr]
    while stack:
        e = stack.pop()
        yield e
        if isinstance(e, ArrayRef):
            stack.append(e.index)
        elif isinstance(e, Unary):
            stack.append(e.operand)
        elif isinstance(e, Binary):
            stack.extend((e.rhs, e.lhs))
        elif isinstance(e, Call):
            stack.extend(reversed(e.args))
        elif isinstance(e, Deriv):
            stack.append(e.target)
