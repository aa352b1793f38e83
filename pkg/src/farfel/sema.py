"""Name resolution and AD-block validation.

Every use site (Var, ArrayRef, Call, assignment target, loop variable)
maps to a Binding in `BoundProgram.table`, keyed by the node's id().
Scoping follows Algol: a nested subprogram sees, and may assign, every
variable of the subprograms enclosing it.  A name assigned in a
subprogram is an implicit local of that subprogram only when no
enclosing subprogram already has a variable of that name.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .diagnostics import Diagnostic, SemaError
from .frontend import nodes as N

LOCAL = "LOCAL"
PARAM = "PARAM"
CAPTURED = "CAPTURED"
SUBPROGRAM = "SUBPROGRAM"
INTRINSIC = "INTRINSIC"

INTRINSICS = {
    "SQRT": 1, "EXP": 1, "LOG": 1, "SIN": 1, "COS": 1, "TAN": 1, "ATAN": 1,
    "ABS": 1, "GAMMA": 1, "LGAMMA": 1, "MIN": None, "MAX": None,
}

_VARIABLE_KINDS = (LOCAL, PARAM, CAPTURED)


@dataclass(frozen=True)
class Binding:
    name: str
    kind: str
    depth: int = 0
    decl: tuple = (0, 0)
    is_param: bool = False
    is_array: bool = False
    is_result: bool = False
    unit: object = field(default=None, compare=False, repr=False)

    @property
    def is_variable(self) -> bool:
        return self.kind in _VARIABLE_KINDS


@dataclass
class _Decl:
    kind: str  # PARAM, LOCAL or SUBPROGRAM
    decl: tuple
    is_array: bool = False
    is_result: bool = False
    implicit: bool = False
    unit: object = None


@dataclass
class Scope:
    sub: N.Subprogram
    parent: "Scope | None"
    names: dict = field(default_factory=dict)

    def chain(self):
        s = self
        while s is not None:
            yield s
            s = s.parent


@dataclass
class BoundProgram:
    program: N.Program
    table: dict
    scopes: dict  # id(Subprogram) -> Scope
    units: dict  # top-level callable units by name

    def binding(self, node) -> Binding:
        return self.table[id(node)]

    def scope_of(self, sub: N.Subprogram) -> Scope:
        return self.scopes[id(sub)]


def _assigned_names(stmts, out: dict) -> None:
    """Names written by statements at this nesting level -> first site."""

    def note(name, node):
        out.setdefault(name, (node.line, node.col))

    def specs(lst):
        for spec in lst:
            if spec.implied_do is not None:
                note(spec.implied_do.var, spec.implied_do)

    for s in stmts:
        if isinstance(s, N.Assign):
            note(s.target.name, s.target)
        elif isinstance(s, N.DoLoop):
            note(s.var, s)
            _assigned_names(s.body, out)
        elif isinstance(s, N.If):
            _assigned_names(s.then, out)
            _assigned_names(s.orelse, out)
        elif isinstance(s, N.AdBlock):
            specs(s.opening)
            _assigned_names(s.body, out)
            specs(s.closing)
            for spec in s.closing:
                for b in spec.bindings:
                    note(b.lhs.name, b.lhs)


class _Resolver:
    def __init__(self, program: N.Program):
        self.program = program
        self.table: dict = {}
        self.scopes: dict = {}
        self.diags: list[Diagnostic] = []
        self.units = {u.name: u for u in program.units if u.kind != "PROGRAM"}

    def error(self, node, message: str) -> None:
        self.diags.append(Diagnostic("sema", node.line, node.col, message))

    # -- scopes --------------------------------------------------------------

    def build_scope(self, sub: N.Subprogram, parent: Scope | None) -> Scope:
        scope = Scope(sub, parent)
        names = scope.names
        site = (sub.line, sub.col)
        for p in sub.params:
            names[p] = _Decl(PARAM, site)
        if sub.kind == "FUNCTION":
            names[sub.name] = _Decl(LOCAL, site, is_result=True)
        for inner in sub.nested:
            names[inner.name] = _Decl(SUBPROGRAM, (inner.line, inner.col), unit=inner)
        for stmt in sub.body:
            if isinstance(stmt, N.Dimension):
                for name, _ in stmt.decls:
                    d = names.get(name)
                    if d is not None and d.kind == PARAM:
                        d.is_array = True
                    elif d is None:
                        names[name] = _Decl(LOCAL, (stmt.line, stmt.col), is_array=True)
                    else:
                        self.error(stmt, f"DIMENSION {name} conflicts with an earlier "
                                         f"declaration of {name}")
        assigned: dict = {}
        _assigned_names(sub.body, assigned)
        for name, where in assigned.items():
            if name in names:
                continue
            if parent is not None and self._outer_variable(parent, name):
                continue
            names[name] = _Decl(LOCAL, where, implicit=True)
        self.scopes[id(sub)] = scope
        return scope

    @staticmethod
    def _outer_variable(scope: Scope, name: str) -> bool:
        for s in scope.chain():
            d = s.names.get(name)
            if d is not None:
                return d.kind != SUBPROGRAM
        return False

    def lookup(self, scope: Scope, name: str, call: bool = False) -> Binding | None:
        depth = 0
        for s in scope.chain():
            d = s.names.get(name)
            if d is not None and not (call and d.is_result):
                kind = d.kind
                if kind != SUBPROGRAM and depth > 0:
                    kind = CAPTURED
                return Binding(name, kind, depth, d.decl, d.kind == PARAM, d.is_array,
                               d.is_result, d.unit)
            depth += 1
        unit = self.units.get(name)
        if unit is not None:
            return Binding(name, SUBPROGRAM, depth, (unit.line, unit.col), unit=unit)
        if name in INTRINSICS:
            return Binding(name, INTRINSIC, 0)
        return None

    # -- traversal -----------------------------------------------------------

    def run(self) -> None:
        mains = [u for u in self.program.units if u.kind == "PROGRAM"]
        for extra in mains[1:]:
            self.error(extra, f"more than one PROGRAM unit ({mains[0].name}, {extra.name})")
        seen: dict = {}
        for u in self.program.units:
            if u.name in seen:
                self.error(u, f"{u.name} is defined twice")
            seen[u.name] = u
        for u in self.program.units:
            self.unit(u, None)

    def unit(self, sub: N.Subprogram, parent: Scope | None) -> None:
        scope = self.build_scope(sub, parent)
        ready = {n for n, d in scope.names.items() if not d.implicit}
        self.stmts(scope, sub.body, ready)

    def stmts(self, scope, stmts, ready: set) -> None:
        for s in stmts:
            self.stmt(scope, s, ready)

    def stmt(self, scope, s, ready: set) -> None:
        if isinstance(s, N.Assign):
            self.expr(scope, s.expr, ready)
            self.target(scope, s.target, ready)
        elif isinstance(s, N.CallStmt):
            self.call(scope, s, s.name, s.args, ready, statement=True)
        elif isinstance(s, N.If):
            self.expr(scope, s.cond, ready)
            self.stmts(scope, s.then, ready)
            self.stmts(scope, s.orelse, ready)
        elif isinstance(s, N.DoLoop):
            self.expr(scope, s.lo, ready)
            self.expr(scope, s.hi, ready)
            if s.step is not None:
                self.expr(scope, s.step, ready)
            self.name_target(scope, s, s.var, ready)
            self.stmts(scope, s.body, ready)
        elif isinstance(s, N.Print):
            for e in s.items:
                self.expr(scope, e, ready)
        elif isinstance(s, N.Dimension):
            for _, extent in s.decls:
                self.expr(scope, extent, ready)
        elif isinstance(s, N.AdBlock):
            self.ad_block(scope, s, ready)
        elif isinstance(s, N.SubprogramDef):
            self.unit(s.sub, scope)

    def ad_block(self, scope, blk: N.AdBlock, ready: set) -> None:
        if blk.mode == N.FORWARD:
            self.specs(scope, blk.opening, ready, opening=True)
            self.stmts(scope, blk.body, ready)
        else:
            self.stmts(scope, blk.body, ready)
            self.specs(scope, blk.opening, ready, opening=True)
        self.specs(scope, blk.closing, ready, opening=False)

    def specs(self, scope, specs, ready: set, opening: bool) -> None:
        for spec in specs:
            ido = spec.implied_do
            if ido is not None:
                self.expr(scope, ido.lo, ready)
                self.expr(scope, ido.hi, ready)
                self.name_target(scope, ido, ido.var, ready)
            for b in spec.bindings:
                if opening:
                    # the seeded variable must already hold a value
                    self.expr(scope, b.lhs, ready)
                    self.expr(scope, b.rhs, ready)
                else:
                    self.expr(scope, b.rhs, ready)
                    self.target(scope, b.lhs, ready)

    def name_target(self, scope, node, name: str, ready: set) -> None:
        b = self.lookup(scope, name)
        if b is None or not b.is_variable:
            self.error(node, f"{name} cannot be assigned: it names a subprogram")
            return
        self.table[id(node)] = b
        ready.add(name)

    def target(self, scope, t, ready: set) -> None:
        if isinstance(t, N.ArrayRef):
            self.expr(scope, t.index, ready)
        b = self.lookup(scope, t.name)
        if b is None or not b.is_variable:
            self.error(t, f"{t.name} cannot be assigned: it names a subprogram")
            return
        if isinstance(t, N.ArrayRef) and not b.is_array:
            self.error(t, f"{t.name} is indexed but is not declared with DIMENSION")
            return
        if isinstance(t, N.Var) and b.is_array:
            self.error(t, f"array {t.name} needs an index in an assignment")
            return
        self.table[id(t)] = b
        ready.add(t.name)

    def read(self, scope, node, name: str, ready: set, argument: bool = False):
        b = self.lookup(scope, name)
        if b is None:
            self.error(node, f"unresolved name {name}: not a variable, parameter, "
                             "subprogram or intrinsic in scope")
            return None
        if b.kind == LOCAL and not b.is_param and name not in ready and not b.is_result:
            self.error(node, f"{name} is read before it is assigned")
            return None
        if not argument and b.kind in (SUBPROGRAM, INTRINSIC):
            self.error(node, f"{name} is a subprogram; it can only be called or passed "
                             "as an argument")
            return None
        self.table[id(node)] = b
        return b

    def call(self, scope, node, name: str, args, ready: set, statement: bool) -> None:
        for a in args:
            if isinstance(a, N.Var):
                self.read(scope, a, a.name, ready, argument=True)
            else:
                self.expr(scope, a, ready)
        b = self.lookup(scope, name, call=True)
        if b is None:
            self.error(node, f"unresolved name {name}: no subprogram or intrinsic of "
                             "that name is in scope")
            return
        if b.kind == INTRINSIC:
            if statement:
                self.error(node, f"{name} is an intrinsic function and cannot be CALLed")
                return
            want = INTRINSICS[name]
            if want is not None and len(args) != want:
                self.error(node, f"{name} takes {want} argument, got {len(args)}")
                return
            if want is None and len(args) < 2:
                self.error(node, f"{name} takes at least 2 arguments, got {len(args)}")
                return
        elif b.kind == SUBPROGRAM:
            unit = b.unit
            if statement and unit.kind == "FUNCTION":
                self.error(node, f"{name} is a FUNCTION; use it in an expression, not CALL")
                return
            if not statement and unit.kind == "SUBROUTINE":
                self.error(node, f"{name} is a SUBROUTINE; invoke it with CALL")
                return
            if len(args) != len(unit.params):
                self.error(node, f"{name} takes {len(unit.params)} argument"
                                 f"{'' if len(unit.params) == 1 else 's'}, got {len(args)}")
                return
        elif b.is_array or not b.is_param:
            # only parameters can hold a subprogram value
            self.error(node, f"{name} is a variable, not a subprogram")
            return
        self.table[id(node)] = b

    def expr(self, scope, e, ready: set) -> None:
        if isinstance(e, N.Num):
            return
        if isinstance(e, N.Var):
            b = self.read(scope, e, e.name, ready)
            if b is not None and b.is_array:
                self.error(e, f"array {e.name} used without an index")
        elif isinstance(e, N.ArrayRef):
            self.expr(scope, e.index, ready)
            b = self.read(scope, e, e.name, ready)
            if b is not None and not b.is_array:
                self.error(e, f"{e.name} is indexed but is not an array")
        elif isinstance(e, N.Unary):
            self.expr(scope, e.operand, ready)
        elif isinstance(e, N.Binary):
            self.expr(scope, e.lhs, ready)
            self.expr(scope, e.rhs, ready)
        elif isinstance(e, N.Call):
            self.call(scope, e, e.name, e.args, ready, statement=False)
        elif isinstance(e, N.Deriv):
            self.expr(scope, e.target, ready)


def resolve_scopes(program: N.Program) -> tuple[BoundProgram, list[Diagnostic]]:
    r = _Resolver(program)
    r.run()
    return BoundProgram(program, r.table, r.scopes, r.units), r.diags


# -- AD-block validation --------------------------------------------------------

def _names_in_expr(e, out: set) -> None:
    for x in N.walk_exprs(e):
        if isinstance(x, (N.Var, N.ArrayRef)):
            out.add(x.name)


def _names_in_stmts(stmts, out: set) -> None:
    for s in stmts:
        if isinstance(s, N.Assign):
            out.add(s.target.name)
            _names_in_expr(s.target, out)
            _names_in_expr(s.expr, out)
        elif isinstance(s, N.CallStmt):
            for a in s.args:
                _names_in_expr(a, out)
        elif isinstance(s, N.If):
            _names_in_expr(s.cond, out)
            _names_in_stmts(s.then, out)
            _names_in_stmts(s.orelse, out)
        elif isinstance(s, N.DoLoop):
            out.add(s.var)
            for e in (s.lo, s.hi, s.step):
                if e is not None:
                    _names_in_expr(e, out)
            _names_in_stmts(s.body, out)
        elif isinstance(s, N.Print):
            for e in s.items:
                _names_in_expr(e, out)
        elif isinstance(s, N.AdBlock):
            _names_in_specs(s.opening, out)
            _names_in_stmts(s.body, out)
            _names_in_specs(s.closing, out)


def _names_in_specs(specs, out: set) -> None:
    for spec in specs:
        for b in spec.bindings:
            _names_in_expr(b.lhs, out)
            _names_in_expr(b.rhs, out)


_MODE_WORD = {N.FORWARD: ("TANGENT", "forward (ADF)"), N.REVERSE: ("COTANGENT", "reverse (ADR)")}


def validate_ad_blocks(bound: BoundProgram) -> list[Diagnostic]:
    diags: list[Diagnostic] = []

    def error(node, message):
        diags.append(Diagnostic("sema", node.line, node.col, message))

    def derivs(e):
        return [x for x in N.walk_exprs(e) if isinstance(x, N.Deriv)]

    def outside(e):
        for d in derivs(e):
            error(d, f"{d.kind}(...) may only appear in ADF/ADR spec lists")

    def check_specs(blk, specs, opening):
        word, label = _MODE_WORD[blk.mode]
        seen: set = set()
        if not opening:
            _names_in_specs(blk.opening, seen)
            _names_in_stmts(blk.body, seen)
        for spec in specs:
            ido = spec.implied_do
            if ido is not None:
                b = bound.table.get(id(ido))
                if b is not None and b.kind == CAPTURED:
                    error(ido, f"implied-DO variable {ido.var} would overwrite the captured "
                               f"variable {ido.var} of an enclosing subprogram")
                outside(ido.lo)
                outside(ido.hi)
            for sb in spec.bindings:
                if opening:
                    d = sb.lhs
                    if d.kind != word:
                        error(d, f"{d.kind} spec in a {label} block")
                        continue
                    b = bound.table.get(id(d.target))
                    if b is None or not b.is_variable:
                        error(d.target, f"{d.kind}({d.target.name}) does not name a variable")
                    outside(sb.rhs)
                else:
                    outside(sb.lhs)
                    for d in derivs(sb.rhs):
                        if d.kind != word:
                            error(d, f"{d.kind} spec in a {label} block")
                        elif d.target.name not in seen:
                            error(d, f"{d.kind}({d.target.name}) is read at END {blk.keyword}, "
                                     f"but {d.target.name} is never used in the "
                                     f"{blk.keyword} block opened at line {blk.line}")

    def stmts(lst, in_block):
        for s in lst:
            if isinstance(s, N.Assign):
                outside(s.target)
                outside(s.expr)
            elif isinstance(s, N.CallStmt):
                for a in s.args:
                    outside(a)
            elif isinstance(s, N.If):
                outside(s.cond)
                stmts(s.then, in_block)
                stmts(s.orelse, in_block)
            elif isinstance(s, N.DoLoop):
                for e in (s.lo, s.hi, s.step):
                    if e is not None:
                        outside(e)
                stmts(s.body, in_block)
            elif isinstance(s, N.Print):
                for e in s.items:
                    outside(e)
            elif isinstance(s, N.Return):
                if in_block:
                    error(s, f"RETURN inside an {in_block} block would skip its END "
                             f"{in_block} spec list")
            elif isinstance(s, N.Dimension):
                if in_block:
                    error(s, f"DIMENSION inside an {in_block} block")
            elif isinstance(s, N.AdBlock):
                check_specs(s, s.opening, opening=True)
                stmts(s.body, s.keyword)
                check_specs(s, s.closing, opening=False)
            elif isinstance(s, N.SubprogramDef):
                stmts(s.sub.body, None)

    for u in bound.program.units:
        stmts(u.body, None)
    return diags


def analyze(program: N.Program) -> BoundProgram:
    """Resolve and validate; raises SemaError listing every diagnostic."""
    bound, diags = resolve_scopes(program)
    if not diags:
        diags = validate_ad_blocks(bound)
    if diags:
        raise SemaError(diags)
    return bound
