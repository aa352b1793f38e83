"""Tree-walking interpreter.

The bound AST is compiled once into nested Python closures (one per
expression and statement node) that take the current Frame.  Frames
chain lexically: a call creates a frame whose parent is the callee's
defining frame, which is what makes captured variables live references.
"""

from __future__ import annotations

import json
import operator
import sys
import threading
from dataclasses import dataclass, field

from . import adcore as ad
from .diagnostics import FarfelError, FarRuntimeError
from .frontend import nodes as N
from .frontend.printer import expr_str
from .sema import CAPTURED, INTRINSIC, LOCAL, PARAM, SUBPROGRAM, BoundProgram

MAX_CALL_DEPTH = 10_000
_STACK_BYTES = 1024 * 1024 * 1024
_PY_RECURSION = 2_000_000


class Array(list):
    """Fixed-extent array passed by reference; Fortran index i is item i-1.

    `serial` orders containers by creation time (see Interpreter.touched).
    """

    __slots__ = ("serial",)

    def __init__(self, values=(), serial: int = 0):
        super().__init__(values)
        self.serial = serial

    @property
    def extent(self) -> int:
        return len(self)

    @property
    def data(self) -> list:
        return list(self)

    def __repr__(self) -> str:
        return f"Array({list(self)!r})"


class Vars(dict):
    """A frame's name -> value map, stamped with a creation serial."""

    __slots__ = ("serial",)


class Frame:
    __slots__ = ("vars", "parent", "pinned")

    def __init__(self, vars, parent: "Frame | None", pinned=frozenset(), serial: int = 0):
        self.vars = Vars(vars)
        self.vars.serial = serial
        self.parent = parent
        self.pinned = pinned


class Closure:
    """A user subprogram paired with the frame it was defined in."""

    __slots__ = ("sub", "env")

    def __init__(self, sub: N.Subprogram, env: Frame):
        self.sub = sub
        self.env = env

    def __repr__(self) -> str:
        return f"<{self.sub.kind} {self.sub.name}>"


class Intrinsic:
    __slots__ = ("name", "fn", "arity")

    def __init__(self, name: str, fn, arity):
        self.name = name
        self.fn = fn
        self.arity = arity

    def __repr__(self) -> str:
        return f"<intrinsic {self.name}>"


INTRINSIC_FNS = {name: Intrinsic(name, fn, 1) for name, fn in ad.UNARY.items() if name != "NEG"}
INTRINSIC_FNS["MIN"] = Intrinsic("MIN", ad.minimum, None)
INTRINSIC_FNS["MAX"] = Intrinsic("MAX", ad.maximum, None)

_CALLABLE = (Closure, Intrinsic)

_COMPARE = {
    ".LT.": operator.lt, ".LE.": operator.le, ".GT.": operator.gt,
    ".GE.": operator.ge, ".EQ.": operator.eq, ".NE.": operator.ne,
}


class _Return(Exception):
    pass


_RETURN = _Return()


def format_value(v) -> str:
    v = ad.value_of(v)
    if isinstance(v, bool):
        return "T" if v else "F"
    if isinstance(v, int):
        return str(v)
    return format(v, ".17g")


@dataclass
class _UnitCode:
    sub: N.Subprogram
    body: list
    nested: list
    is_function: bool


@dataclass
class _BlockState:
    tag: ad.Tag
    leaves: dict = field(default_factory=dict)  # (id(container), key) -> node id
    adjoints: list = field(default_factory=list)


def _runtime(node, message: str) -> FarRuntimeError:
    return FarRuntimeError(message, node.line, node.col)


def _as_index(v, node, what: str) -> int:
    x = ad.value_of(v)
    if isinstance(x, bool) or x != int(x):
        raise _runtime(node, f"{what} must be an integer, got {format_value(x)}")
    return int(x)


class Interpreter:
    """One program execution: owns the AD engine, output buffer and frames."""

    def __init__(self, bound: BoundProgram, structured: bool = False,
                 max_depth: int = MAX_CALL_DEPTH, tape_hook=None):
        self.bound = bound
        self.table = bound.table
        self.engine = ad.Engine(tape_hook=tape_hook)
        self.lines: list[str] = []
        self.records: list[dict] = []
        self.structured = structured
        self.max_depth = max_depth
        self.depth = 0
        self.blocks: list[_BlockState] = []
        # containers that received a tagged value during the active blocks;
        # frames and arrays created after a block began die before it ends
        self.touched: dict = {}
        self.serial = 0
        self._code: dict = {}
        self.globals = Frame({}, None)
        for name, unit in bound.units.items():
            self.globals.vars[name] = Closure(unit, self.globals)

    # -- helpers ---------------------------------------------------------------

    def unit_code(self, sub: N.Subprogram) -> _UnitCode:
        code = self._code.get(id(sub))
        if code is None:
            code = _UnitCode(sub, [], sub.nested, sub.kind == "FUNCTION")
            self._code[id(sub)] = code
            code.body = self.stmts(sub.body, sub)
        return code

    def output(self) -> str:
        return "".join(line + "\n" for line in self.lines)

    @staticmethod
    def _frame_getter(depth: int):
        if depth == 0:
            return lambda fr: fr
        if depth == 1:
            return lambda fr: fr.parent

        def up(fr):
            for _ in range(depth):
                fr = fr.parent
            return fr

        return up

    # -- calls -----------------------------------------------------------------

    def invoke(self, callee, args: list, node):
        if isinstance(callee, Intrinsic):
            if callee.arity is not None and len(args) != callee.arity:
                raise _runtime(node, f"{callee.name} takes {callee.arity} argument, "
                                     f"got {len(args)}")
            for a in args:
                if isinstance(a, (_CALLABLE, Array)):
                    raise _runtime(node, f"{callee.name} needs numeric arguments")
            return callee.fn(*args)
        if not isinstance(callee, Closure):
            raise _runtime(node, f"{format_value(callee) if not isinstance(callee, Array) else 'an array'} "
                                 "is not callable")
        sub = callee.sub
        params = sub.params
        if len(args) != len(params):
            raise _runtime(node, f"{sub.name} takes {len(params)} argument"
                                 f"{'' if len(params) == 1 else 's'}, got {len(args)}")
        if self.depth >= self.max_depth:
            raise _runtime(node, f"recursion depth exceeds {self.max_depth} calls")
        code = self._code.get(id(sub)) or self.unit_code(sub)
        self.serial += 1
        fr = Frame(zip(params, args), callee.env, serial=self.serial)
        for inner in code.nested:
            fr.vars[inner.name] = Closure(inner, fr)
        self.depth += 1
        try:
            for s in code.body:
                s(fr)
        except _Return:
            pass
        finally:
            self.depth -= 1
        if code.is_function:
            try:
                return fr.vars[sub.name]
            except KeyError:
                raise _runtime(node, f"FUNCTION {sub.name} returned without assigning "
                                     f"{sub.name}") from None
        return None

    def call(self, name: str, *args):
        """Call a top-level FUNCTION or SUBROUTINE by name from Python."""
        closure = self.globals.vars.get(name)
        if closure is None:
            raise KeyError(name)
        return self.invoke(closure, list(args), closure.sub)

    def subprogram(self, name: str):
        if name in self.globals.vars:
            return self.globals.vars[name]
        return INTRINSIC_FNS[name]

    # -- expression compilation ------------------------------------------------

    def slot(self, node):
        """Compile a Var/ArrayRef into fr -> (container, key)."""
        b = self.table[id(node)]
        name = node.name
        up = self._frame_getter(b.depth)
        if isinstance(node, N.Var):
            return lambda fr: (up(fr).vars, name)
        idx = self.expr(node.index)

        def ref(fr):
            arr = up(fr).vars.get(name)
            if not isinstance(arr, Array):
                raise _runtime(node, f"{name} is not bound to an array")
            i = _as_index(idx(fr), node, f"index of {name}")
            if not 1 <= i <= len(arr):
                raise _runtime(node, f"{name}({i}) is out of bounds for extent {len(arr)}")
            return arr, i - 1

        return ref

    def read_slot(self, node):
        ref = self.slot(node)
        name = node.name

        def read(fr):
            c, k = ref(fr)
            try:
                return c[k]
            except KeyError:
                raise _runtime(node, f"{name} has no value") from None

        return read

    def var(self, node):
        b = self.table[id(node)]
        name = node.name
        if b.kind == INTRINSIC:
            fn = INTRINSIC_FNS[name]
            return lambda fr: fn
        up = self._frame_getter(b.depth)

        if b.depth == 0:
            def get(fr):
                try:
                    return fr.vars[name]
                except KeyError:
                    raise _runtime(node, f"{name} has no value") from None
        else:
            def get(fr):
                try:
                    return up(fr).vars[name]
                except KeyError:
                    raise _runtime(node, f"{name} has no value") from None

        return get

    def expr(self, e):
        if isinstance(e, N.Num):
            v = e.value
            return lambda fr: v
        if isinstance(e, N.Var):
            return self.var(e)
        if isinstance(e, N.ArrayRef):
            ref = self.slot(e)

            def elem(fr):
                c, k = ref(fr)
                return c[k]

            return elem
        if isinstance(e, N.Binary):
            lhs, rhs = self.expr(e.lhs), self.expr(e.rhs)
            op = e.op
            if op in ad.BINARY:
                fn = ad.BINARY[op]
                return lambda fr: fn(lhs(fr), rhs(fr))
            if op in _COMPARE:
                cmp = _COMPARE[op]
                vo = ad.value_of
                return lambda fr: cmp(vo(lhs(fr)), vo(rhs(fr)))
            if op == ".AND.":
                return lambda fr: bool(ad.value_of(lhs(fr))) and bool(ad.value_of(rhs(fr)))
            if op == ".OR.":
                return lambda fr: bool(ad.value_of(lhs(fr))) or bool(ad.value_of(rhs(fr)))
            raise AssertionError(op)
        if isinstance(e, N.Unary):
            inner = self.expr(e.operand)
            if e.op == "NEG":
                neg = ad.neg
                return lambda fr: neg(inner(fr))
            return lambda fr: not ad.value_of(inner(fr))
        if isinstance(e, N.Call):
            return self.call_expr(e, e.name, e.args)
        if isinstance(e, N.Deriv):
            return self.deriv(e)
        raise AssertionError(e)

    def arg(self, a):
        # bare names pass arrays by reference and subprograms as closures
        if isinstance(a, N.Var):
            b = self.table[id(a)]
            if b.kind == SUBPROGRAM:
                up = self._frame_getter(b.depth)
                name = a.name
                return lambda fr: up(fr).vars[name]
        return self.expr(a)

    def call_expr(self, node, name: str, args):
        b = self.table[id(node)]
        argfns = [self.arg(a) for a in args]
        if b.kind == INTRINSIC:
            fn = INTRINSIC_FNS[name].fn
            if len(argfns) == 1:
                a0 = argfns[0]
                return lambda fr: fn(a0(fr))
            return lambda fr: fn(*[a(fr) for a in argfns])
        up = self._frame_getter(b.depth)
        invoke = self.invoke

        def call(fr):
            try:
                callee = up(fr).vars[name]
            except KeyError:
                raise _runtime(node, f"{name} has no value") from None
            return invoke(callee, [a(fr) for a in argfns], node)

        return call

    def deriv(self, d: N.Deriv):
        ref = self.slot(d.target)
        name = d.target.name
        blocks = self.blocks
        tangent_of = ad.tangent_of

        def read(fr):
            st = blocks[-1]
            c, k = ref(fr)
            if st.tag.mode == ad.FORWARD:
                try:
                    v = c[k]
                except KeyError:
                    raise _runtime(d, f"{name} has no value at the end of the ADF "
                                      "block") from None
                return tangent_of(v, st.tag)
            nid = st.leaves.get((id(c), k))
            return 0.0 if nid is None else st.adjoints[nid]

        return read

    # -- statement compilation -------------------------------------------------

    def stmts(self, body, unit) -> list:
        out = []
        for s in body:
            fn = self.stmt(s, unit)
            if fn is not None:
                out.append(self._located(fn, s))
        return out

    @staticmethod
    def _located(fn, s):
        line, col = s.line, s.col

        def run(fr):
            try:
                fn(fr)
            except FarfelError as err:
                raise err.at(line, col)
            except (ArithmeticError, ValueError) as err:
                raise FarRuntimeError(f"arithmetic error: {err}", line, col) from None

        return run

    def assign_fn(self, target, unit):
        b = self.table[id(target)]
        tagged = ad._TAGGED
        if isinstance(target, N.Var):
            name = target.name
            up = self._frame_getter(b.depth)
            pinned = b.depth == 0 and unit.kind == "PROGRAM"

            def store(fr, v):
                f = up(fr)
                if pinned and name in f.pinned:
                    return
                vars = f.vars
                vars[name] = v
                if isinstance(v, tagged):
                    self.touched[id(vars)] = vars
            return store
        ref = self.slot(target)

        def store(fr, v):
            c, k = ref(fr)
            c[k] = v
            if isinstance(v, tagged):
                self.touched[id(c)] = c
        return store

    def stmt(self, s, unit):
        if isinstance(s, N.Assign):
            rhs = self.expr(s.expr)
            store = self.assign_fn(s.target, unit)
            return lambda fr: store(fr, rhs(fr))
        if isinstance(s, N.CallStmt):
            return self.call_expr(s, s.name, s.args)
        if isinstance(s, N.If):
            cond = self.expr(s.cond)
            then = self.stmts(s.then, unit)
            orelse = self.stmts(s.orelse, unit)
            vo = ad.value_of

            def if_(fr):
                for x in (then if vo(cond(fr)) else orelse):
                    x(fr)
            return if_
        if isinstance(s, N.DoLoop):
            return self.do_loop(s, unit)
        if isinstance(s, N.Print):
            return self.print_(s)
        if isinstance(s, N.Return):
            def ret(fr):
                raise _RETURN
            return ret
        if isinstance(s, N.Dimension):
            return self.dimension(s, unit)
        if isinstance(s, N.AdBlock):
            return self.adf(s, unit) if s.mode == N.FORWARD else self.adr(s, unit)
        if isinstance(s, N.SubprogramDef):
            return None
        raise AssertionError(s)

    def do_loop(self, s: N.DoLoop, unit):
        lo, hi = self.expr(s.lo), self.expr(s.hi)
        step = self.expr(s.step) if s.step is not None else (lambda fr: 1)
        store = self.assign_fn_name(s, s.var)
        body = self.stmts(s.body, unit)

        def loop(fr):
            a = _as_index(lo(fr), s, "DO start")
            b = _as_index(hi(fr), s, "DO end")
            c = _as_index(step(fr), s, "DO step")
            if c == 0:
                raise _runtime(s, "DO step is zero")
            i = a
            for i in range(a, b + (1 if c > 0 else -1), c):
                store(fr, i)
                for x in body:
                    x(fr)
            else:
                i = a if (c > 0 and a > b) or (c < 0 and a < b) else i + c
            store(fr, i)
        return loop

    def assign_fn_name(self, node, name: str):
        b = self.table[id(node)]
        up = self._frame_getter(b.depth)

        def store(fr, v):
            up(fr).vars[name] = v
        return store

    def print_(self, s: N.Print):
        items = [self.expr(e) for e in s.items]
        names = [e.name if isinstance(e, N.Var) else expr_str(e) for e in s.items]

        def pr(fr):
            vals = [ad.value_of(f(fr)) for f in items]
            texts = [format_value(v) for v in vals]
            self.lines.append(" ".join(texts))
            for name, v, text in zip(names, vals, texts):
                self.records.append({"name": name, "value": v, "decimal": text})
        return pr

    def dimension(self, s: N.Dimension, unit):
        decls = [(name, self.expr(ext), name in unit.params) for name, ext in s.decls]

        def dim(fr):
            for name, ext, is_param in decls:
                n = _as_index(ext(fr), s, f"extent of {name}")
                if n < 1:
                    raise _runtime(s, f"extent of {name} must be positive, got {n}")
                if is_param:
                    arr = fr.vars.get(name)
                    if not isinstance(arr, Array):
                        raise _runtime(s, f"argument {name} is declared as an array but "
                                          "received a scalar")
                    if arr.extent < n:
                        raise _runtime(s, f"argument {name} has extent {arr.extent}, "
                                          f"smaller than its declared extent {n}")
                elif not isinstance(fr.vars.get(name), Array):
                    self.serial += 1
                    fr.vars[name] = Array([0.0] * n, self.serial)
        return dim

    # -- AD blocks ---------------------------------------------------------------

    def spec_runner(self, specs, unit, each):
        """Compile spec lists; `each(fr, binding_fns)` runs once per expansion."""
        compiled = []
        for spec in specs:
            bfs = [(b, self.slot(b.lhs.target) if isinstance(b.lhs, N.Deriv) else None,
                    self.expr(b.rhs),
                    self.assign_fn(b.lhs, unit) if not isinstance(b.lhs, N.Deriv) else None)
                   for b in spec.bindings]
            ido = spec.implied_do
            if ido is None:
                compiled.append((None, bfs))
            else:
                compiled.append(((self.expr(ido.lo), self.expr(ido.hi),
                                  self.assign_fn_name(ido, ido.var), ido), bfs))

        def run(fr):
            for loop, bfs in compiled:
                if loop is None:
                    for b in bfs:
                        each(fr, b)
                    continue
                lo, hi, store, node = loop
                for i in range(_as_index(lo(fr), node, "implied-DO start"),
                               _as_index(hi(fr), node, "implied-DO end") + 1):
                    store(fr, i)
                    for b in bfs:
                        each(fr, b)
        return run

    def _enter_block(self):
        outer = self.touched
        self.touched = {}
        self.serial += 1
        return outer, self.serial

    def _leave_block(self, saved, tag: ad.Tag) -> None:
        """Strip `tag` from every surviving container written with a tagged value.

        A value carrying `tag` can only reach a frame or array by a store
        made while the block ran.  Containers created during the block are
        unreachable once it ends and are dropped; the rest stay on the
        enclosing block's list for its own tag.
        """
        outer, start = saved
        strip, tagged = ad.strip, ad._TAGGED
        for key, c in self.touched.items():
            if c.serial >= start:
                continue
            items = c.items() if isinstance(c, dict) else enumerate(c)
            for k, v in list(items):
                if isinstance(v, tagged):
                    c[k] = strip(v, tag)
            outer[key] = c
        self.touched = outer

    def adf(self, blk: N.AdBlock, unit):
        engine = self.engine
        promote, Dual = ad.promote, ad.ForwardDual
        tag_box: list = []

        def seed(fr, b):
            _, ref, rhs, _ = b
            c, k = ref(fr)
            try:
                cur = c[k]
            except KeyError:
                raise _runtime(b[0].lhs, f"TANGENT({b[0].lhs.target.name}) is seeded but "
                                         f"{b[0].lhs.target.name} has no value") from None
            if isinstance(cur, (_CALLABLE, Array)):
                raise _runtime(b[0].lhs, f"{b[0].lhs.target.name} is not a number")
            c[k] = Dual(tag_box[-1], promote(cur), rhs(fr))
            self.touched[id(c)] = c

        def close(fr, b):
            _, _, rhs, store = b
            store(fr, rhs(fr))

        opening = self.spec_runner(blk.opening, unit, seed)
        closing = self.spec_runner(blk.closing, unit, close)
        body = self.stmts(blk.body, unit)

        def run(fr):
            tag = engine.fresh_tag(ad.FORWARD)
            engine.enter(tag)
            outer = self._enter_block()
            tag_box.append(tag)
            self.blocks.append(_BlockState(tag))
            try:
                opening(fr)
                for x in body:
                    x(fr)
                closing(fr)
            finally:
                self.blocks.pop()
                tag_box.pop()
                engine.leave(tag)
                self._leave_block(outer, tag)
        return run

    def adr(self, blk: N.AdBlock, unit):
        engine = self.engine
        promote = ad.promote
        states: list = []
        seeds: list = []

        # independents: every COTANGENT(...) read in the closing list
        indep_specs = []
        for spec in blk.closing:
            targets = [d.target for b in spec.bindings for d in N.walk_exprs(b.rhs)
                       if isinstance(d, N.Deriv)]
            indep_specs.append(N.AdSpec([N.SpecBinding(N.Deriv("COTANGENT", t), N.Num(0))
                                         for t in targets], spec.implied_do))

        def make_leaf(fr, b):
            _, ref, _, _ = b
            st = states[-1]
            c, k = ref(fr)
            key = (id(c), k)
            if key in st.leaves:
                return
            name = b[0].lhs.target.name
            try:
                cur = c[k]
            except KeyError:
                raise _runtime(b[0].lhs, f"COTANGENT({name}) is requested but {name} has "
                                         "no value when the ADR block starts") from None
            if isinstance(cur, (_CALLABLE, Array)):
                raise _runtime(b[0].lhs, f"{name} is not a number")
            leaf = st.tag.tape.leaf(promote(cur))
            c[k] = leaf
            self.touched[id(c)] = c
            st.leaves[key] = leaf.node

        def seed(fr, b):
            binding, ref, rhs, _ = b
            st = states[-1]
            c, k = ref(fr)
            name = binding.lhs.target.name
            try:
                v = c[k]
            except KeyError:
                raise _runtime(binding.lhs, f"COTANGENT({name}) is seeded but {name} was "
                                            "never assigned") from None
            # a seed that mentions body results is a constant of this block
            s = ad.strip(rhs(fr), st.tag)
            if isinstance(v, ad.ReverseTracer) and v.tag is st.tag:
                seeds.append((v.node, s))
            # otherwise the dependent does not depend on any independent: its seed
            # contributes nothing and every cotangent stays zero

        def close(fr, b):
            _, _, rhs, store = b
            store(fr, rhs(fr))

        leaves = self.spec_runner(indep_specs, unit, make_leaf)
        opening = self.spec_runner(blk.opening, unit, seed)
        closing = self.spec_runner(blk.closing, unit, close)
        body = self.stmts(blk.body, unit)

        def run(fr):
            tag = engine.fresh_tag(ad.REVERSE)
            engine.enter(tag)
            outer = self._enter_block()
            st = _BlockState(tag)
            states.append(st)
            mark = len(seeds)
            try:
                leaves(fr)
                for x in body:
                    x(fr)
                opening(fr)
                mine = seeds[mark:]
                del seeds[mark:]
                engine.leave(tag)
                st.adjoints = [ad.strip(a, tag) for a in ad.reverse_sweep(tag.tape, mine)]
                if engine.tape_hook is not None:
                    engine.tape_hook(tag.tape)
                self.blocks.append(st)
                try:
                    closing(fr)
                finally:
                    self.blocks.pop()
            finally:
                del seeds[mark:]
                states.pop()
                if engine.active and engine.active[-1] is tag:
                    engine.leave(tag)
                self._leave_block(outer, tag)
        return run

    # -- program ---------------------------------------------------------------

    def run_main(self, overrides: dict | None = None) -> None:
        main = self.bound.program.main
        if main is None:
            raise FarRuntimeError("no PROGRAM unit to run", 1, 1)
        overrides = dict(overrides or {})
        fr = Frame(dict(overrides), self.globals, frozenset(overrides))
        for inner in main.nested:
            fr.vars[inner.name] = Closure(inner, fr)
        code = self.unit_code(main)
        try:
            for s in code.body:
                s(fr)
        except _Return:
            pass
        self.main_frame = fr


def run_deep(fn, *args, **kwargs):
    """Run `fn` on a thread with a large stack so deep recursion is safe."""
    box: dict = {}

    def target():
        old = sys.getrecursionlimit()
        sys.setrecursionlimit(_PY_RECURSION)
        try:
            box["value"] = fn(*args, **kwargs)
        except BaseException as err:  # re-raised on the calling thread
            box["error"] = err
        finally:
            sys.setrecursionlimit(old)

    old_size = threading.stack_size()
    threading.stack_size(_STACK_BYTES)
    try:
        t = threading.Thread(target=target)
        t.start()
    finally:
        threading.stack_size(old_size)
    t.join()
    if "error" in box:
        raise box["error"]
    return box.get("value")


@dataclass
class RunResult:
    output: str
    status: int
    records: list
    error: FarfelError | None = None
    interpreter: Interpreter | None = None

    def values(self) -> list[float]:
        return [r["value"] for r in self.records]

    def structured(self) -> str:
        return "".join(json.dumps(r) + "\n" for r in self.records)


def program_variables(bound: BoundProgram) -> set:
    main = bound.program.main
    if main is None:
        return set()
    scope = bound.scope_of(main)
    return {n for n, d in scope.names.items() if d.kind == LOCAL and not d.is_array}


def run_program(bound: BoundProgram, overrides=(), structured: bool = False,
                tape_hook=None) -> RunResult:
    """Execute the PROGRAM unit; overrides pin top-level variables."""
    interp = Interpreter(bound, structured=structured, tape_hook=tape_hook)
    try:
        run_deep(interp.run_main, dict(overrides))
    except FarfelError as err:
        return RunResult(interp.output(), 3, interp.records, err, interp)
    return RunResult(interp.output(), 0, interp.records, None, interp)


__all__ = [
    "Array", "Closure", "Frame", "Interpreter", "Intrinsic", "RunResult",
    "format_value", "program_variables", "run_deep", "run_program",
    "CAPTURED", "PARAM",
]
