"""Pretty-printer; its output reparses to an AST equal to the input."""

from __future__ import annotations

from . import nodes as N

_PREC = {
    ".OR.": 1, ".AND.": 2, ".NOT.": 3,
    ".LT.": 4, ".LE.": 4, ".GT.": 4, ".GE.": 4, ".EQ.": 4, ".NE.": 4,
    "+": 5, "-": 5, "*": 6, "/": 6, "NEG": 7, "**": 8,
}
_ATOM = 9
_NON_LEFT_ASSOC = {"**", ".LT.", ".LE.", ".GT.", ".GE.", ".EQ.", ".NE."}
_SPACED = {".OR.", ".AND.", ".LT.", ".LE.", ".GT.", ".GE.", ".EQ.", ".NE.", "+", "-"}


def _prec(e) -> int:
    if isinstance(e, N.Binary):
        return _PREC[e.op]
    if isinstance(e, N.Unary):
        return _PREC[e.op]
    return _ATOM


def format_number(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    return repr(float(v))


def expr_str(e) -> str:
    if isinstance(e, N.Num):
        return format_number(e.value)
    if isinstance(e, N.Var):
        return e.name
    if isinstance(e, N.ArrayRef):
        return f"{e.name}({expr_str(e.index)})"
    if isinstance(e, N.Call):
        return f"{e.name}({', '.join(expr_str(a) for a in e.args)})"
    if isinstance(e, N.Deriv):
        return f"{e.kind}({expr_str(e.target)})"
    if isinstance(e, N.Unary):
        p = _PREC[e.op]
        inner = expr_str(e.operand)
        if _prec(e.operand) < p:
            inner = f"({inner})"
        return f"-{inner}" if e.op == "NEG" else f".NOT. {inner}"
    if isinstance(e, N.Binary):
        p = _PREC[e.op]
        left, right = expr_str(e.lhs), expr_str(e.rhs)
        lp, rp = _prec(e.lhs), _prec(e.rhs)
        if lp < p or (lp == p and e.op in _NON_LEFT_ASSOC):
            left = f"({left})"
        if rp < p or (rp == p and e.op != "**"):
            right = f"({right})"
        sep = f" {e.op} " if e.op in _SPACED else e.op
        return f"{left}{sep}{right}"
    raise TypeError(f"not an expression: {e!r}")


def _binding_str(b: N.SpecBinding) -> str:
    return f"{expr_str(b.lhs)} = {expr_str(b.rhs)}"


def _ido_str(ido: N.ImpliedDo) -> str:
    return f"{ido.var} = {expr_str(ido.lo)}, {expr_str(ido.hi)}"


def spec_list_str(specs: list) -> str:
    if len(specs) == 1 and specs[0].implied_do is not None:
        s = specs[0]
        return ", ".join([*map(_binding_str, s.bindings), _ido_str(s.implied_do)])
    parts = []
    for s in specs:
        if s.implied_do is None:
            parts.extend(map(_binding_str, s.bindings))
        else:
            inner = ", ".join([*map(_binding_str, s.bindings), _ido_str(s.implied_do)])
            parts.append(f"({inner})")
    return ", ".join(parts)


class _Writer:
    def __init__(self, indent: str = "  "):
        self.lines: list[str] = []
        self.indent = indent

    def emit(self, depth: int, text: str) -> None:
        self.lines.append(self.indent * depth + text)

    def unit(self, sub: N.Subprogram, depth: int) -> None:
        if sub.kind == "PROGRAM":
            self.emit(depth, f"PROGRAM {sub.name}")
        else:
            self.emit(depth, f"{sub.kind} {sub.name}({', '.join(sub.params)})")
        self.block(sub.body, depth + 1)
        self.emit(depth, "END")

    def block(self, stmts: list, depth: int) -> None:
        for s in stmts:
            self.stmt(s, depth)

    def stmt(self, s, depth: int) -> None:
        if isinstance(s, N.Assign):
            self.emit(depth, f"{expr_str(s.target)} = {expr_str(s.expr)}")
        elif isinstance(s, N.CallStmt):
            args = f"({', '.join(map(expr_str, s.args))})" if s.args else ""
            self.emit(depth, f"CALL {s.name}{args}")
        elif isinstance(s, N.Print):
            items = ", ".join(map(expr_str, s.items))
            self.emit(depth, f"PRINT *, {items}" if items else "PRINT *")
        elif isinstance(s, N.Return):
            self.emit(depth, "RETURN")
        elif isinstance(s, N.Dimension):
            decls = ", ".join(f"{n}({expr_str(x)})" for n, x in s.decls)
            self.emit(depth, f"DIMENSION {decls}")
        elif isinstance(s, N.If):
            self.emit(depth, f"IF ({expr_str(s.cond)}) THEN")
            self.block(s.then, depth + 1)
            orelse = s.orelse
            while len(orelse) == 1 and isinstance(orelse[0], N.If):
                inner = orelse[0]
                self.emit(depth, f"ELSE IF ({expr_str(inner.cond)}) THEN")
                self.block(inner.then, depth + 1)
                orelse = inner.orelse
            if orelse:
                self.emit(depth, "ELSE")
                self.block(orelse, depth + 1)
            self.emit(depth, "END IF")
        elif isinstance(s, N.DoLoop):
            step = f", {expr_str(s.step)}" if s.step is not None else ""
            self.emit(depth, f"DO {s.var} = {expr_str(s.lo)}, {expr_str(s.hi)}{step}")
            self.block(s.body, depth + 1)
            self.emit(depth, "END DO")
        elif isinstance(s, N.AdBlock):
            self.emit(depth, f"{s.keyword}({spec_list_str(s.opening)})")
            self.block(s.body, depth + 1)
            self.emit(depth, f"END {s.keyword}({spec_list_str(s.closing)})")
        elif isinstance(s, N.SubprogramDef):
            self.unit(s.sub, depth)
        else:
            raise TypeError(f"not a statement: {s!r}")


def format_program(program: N.Program) -> str:
    w = _Writer()
    for i, unit in enumerate(program.units):
        if i:
            w.lines.append("")
        w.unit(unit, 0)
    return "\n".join(w.lines) + "\n"


def format_subprogram(sub: N.Subprogram) -> str:
    w = _Writer()
    w.unit(sub, 0)
    return "\n".join(w.lines) + "\n"
