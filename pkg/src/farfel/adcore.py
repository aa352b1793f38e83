"""Runtime AD engine: tagged forward duals and taped reverse tracers.

Every ADF/ADR activation gets a fresh tag from a per-execution counter.
Plain numbers are Python ints and floats.  A tagged value wraps a value
carrying only smaller tags, so the outermost layer always holds the
largest tag.  Each arithmetic primitive dispatches on the largest tag
present among its operands:

* FORWARD tag t: the result is ForwardDual(t, ...) built by the chain rule,
  and an operand without layer t contributes tangent zero.
* REVERSE tag t: the primal is computed, a node with local partials is
  appended to t's tape, and a ReverseTracer pointing at it is returned.

Primal, tangent, partial and adjoint arithmetic all go back through these
same primitives, so any nesting of the two modes composes, including
reverse-over-reverse and forward-over-reverse.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .diagnostics import DomainError, FarRuntimeError
from .specfun import polygamma

FORWARD = "FORWARD"
REVERSE = "REVERSE"


class Tag:
    __slots__ = ("id", "mode", "tape")

    def __init__(self, id: int, mode: str):
        self.id = id
        self.mode = mode
        self.tape = Tape(self) if mode == REVERSE else None

    def __repr__(self) -> str:
        return f"Tag({self.id}, {self.mode})"


class ForwardDual:
    __slots__ = ("tag", "primal", "tangent")

    def __init__(self, tag: Tag, primal, tangent):
        self.tag = tag
        self.primal = primal
        self.tangent = tangent

    def __repr__(self) -> str:
        return f"ForwardDual({self.tag.id}, {self.primal!r}, {self.tangent!r})"


class ReverseTracer:
    __slots__ = ("tag", "node", "primal")

    def __init__(self, tag: Tag, node: int, primal):
        self.tag = tag
        self.node = node
        self.primal = primal

    def __repr__(self) -> str:
        return f"ReverseTracer({self.tag.id}, #{self.node}, {self.primal!r})"


_PLAIN = (int, float, bool)
_TAGGED = (ForwardDual, ReverseTracer)


class TapeNode:
    __slots__ = ("id", "op", "inputs", "partials", "primal", "adjoint")

    def __init__(self, id: int, op: str, inputs: tuple, partials: tuple, primal):
        self.id = id
        self.op = op
        self.inputs = inputs
        self.partials = partials
        self.primal = primal
        self.adjoint = 0.0


class Tape:
    """Append-only operation record for one ADR activation."""

    def __init__(self, tag: Tag):
        self.tag = tag
        self.nodes: list[TapeNode] = []
        self.closed = False
        self.swept = False
        self.visits = 0

    def __len__(self) -> int:
        return len(self.nodes)

    def leaf(self, primal) -> ReverseTracer:
        return self.record("leaf", primal, ())

    def record(self, op: str, primal, edges) -> ReverseTracer:
        if self.closed:
            raise FarRuntimeError(
                f"value from a finished ADR block (tag {self.tag.id}) used in arithmetic")
        nid = len(self.nodes)
        self.nodes.append(TapeNode(nid, op, tuple(e[0] for e in edges),
                                   tuple(e[1] for e in edges), primal))
        return ReverseTracer(self.tag, nid, primal)

    def dump(self) -> list[str]:
        out = []
        for n in self.nodes:
            ins = ",".join(str(i) for i in n.inputs) or "-"
            parts = ",".join(format(value_of(p), ".17g") for p in n.partials) or "-"
            out.append(f"{n.id} {n.op} {ins} {parts} {format(value_of(n.primal), '.17g')}")
        return out


@dataclass
class Engine:
    """Per-execution tag counter and activation stack."""

    next_id: int = 1
    active: list = field(default_factory=list)
    max_active: int = 0
    finished_tapes: int = 0
    tape_hook: object = None  # called with each tape after its sweep

    def fresh_tag(self, mode: str) -> Tag:
        tag = Tag(self.next_id, mode)
        self.next_id += 1
        return tag

    def enter(self, tag: Tag) -> None:
        self.active.append(tag)
        if len(self.active) > self.max_active:
            self.max_active = len(self.active)

    def leave(self, tag: Tag) -> None:
        top = self.active.pop()
        assert top is tag, "AD activations must nest"
        if tag.tape is not None:
            tag.tape.closed = True
            self.finished_tapes += 1


# -- helpers ------------------------------------------------------------------

def is_tagged(v) -> bool:
    return isinstance(v, _TAGGED)


def value_of(v):
    """The underlying plain number with every tag layer removed."""
    while isinstance(v, _TAGGED):
        v = v.primal
    return v


def tags_of(v) -> list[int]:
    """Tag ids of every layer in `v`, outermost first (depth-first)."""
    out: list[int] = []
    stack = [v]
    while stack:
        x = stack.pop()
        if isinstance(x, ForwardDual):
            out.append(x.tag.id)
            stack.extend((x.tangent, x.primal))
        elif isinstance(x, ReverseTracer):
            out.append(x.tag.id)
            stack.append(x.primal)
    return out


def _top(a, b) -> Tag:
    ta = a.tag if isinstance(a, _TAGGED) else None
    tb = b.tag if isinstance(b, _TAGGED) else None
    if ta is None:
        return tb
    if tb is None or ta.id >= tb.id:
        return ta
    return tb


def _peel(v, t: Tag):
    """(value with layer t removed, tangent or node id) -- None if v lacks t."""
    if isinstance(v, _TAGGED) and v.tag is t:
        if t.mode == FORWARD:
            return v.primal, v.tangent
        return v.primal, v.node
    return v, None


def _split(a, b):
    """(t, pa, da, pb, db): the top tag and both operands peeled at it."""
    if isinstance(a, _TAGGED):
        ta = a.tag
        if isinstance(b, _TAGGED):
            tb = b.tag
            if ta is tb:
                if ta.mode == FORWARD:
                    return ta, a.primal, a.tangent, b.primal, b.tangent
                return ta, a.primal, a.node, b.primal, b.node
            if tb.id > ta.id:
                return tb, a, None, b.primal, (b.tangent if tb.mode == FORWARD else b.node)
        return ta, a.primal, (a.tangent if ta.mode == FORWARD else a.node), b, None
    tb = b.tag
    return tb, a, None, b.primal, (b.tangent if tb.mode == FORWARD else b.node)


def _real(x) -> float:
    return float(x)


# -- plain arithmetic -----------------------------------------------------------

def _plain_div(a, b):
    if b == 0:
        raise DomainError("/", a, b, message=f"division by exact zero: {a!r}/{b!r}")
    if type(a) is int and type(b) is int:
        q = abs(a) // abs(b)
        return q if (a >= 0) == (b >= 0) else -q
    return a / b


def _plain_pow(a, b):
    if a == 0 and b < 0:
        raise DomainError("**", a, b, message=f"zero raised to a negative power: {a!r}**{b!r}")
    if type(a) is int and type(b) is int and b < 0:
        a = float(a)
    try:
        r = a ** b
    except OverflowError:
        raise DomainError("**", a, b, message=f"overflow in {a!r}**{b!r}") from None
    if isinstance(r, complex):
        raise DomainError("**", a, b,
                          message=f"negative base to a non-integer power: {a!r}**{b!r}")
    return r


# -- binary primitives ----------------------------------------------------------

def add(a, b):
    if type(a) in _PLAIN and type(b) in _PLAIN:
        return a + b
    t, pa, da, pb, db = _split(a, b)
    p = add(pa, pb)
    if t.mode == FORWARD:
        d = da if db is None else (db if da is None else add(da, db))
        return ForwardDual(t, p, d)
    edges = []
    if da is not None:
        edges.append((da, 1.0))
    if db is not None:
        edges.append((db, 1.0))
    return t.tape.record("+", p, edges)


def sub(a, b):
    if type(a) in _PLAIN and type(b) in _PLAIN:
        return a - b
    t, pa, da, pb, db = _split(a, b)
    p = sub(pa, pb)
    if t.mode == FORWARD:
        if db is None:
            d = da
        elif da is None:
            d = neg(db)
        else:
            d = sub(da, db)
        return ForwardDual(t, p, d)
    edges = []
    if da is not None:
        edges.append((da, 1.0))
    if db is not None:
        edges.append((db, -1.0))
    return t.tape.record("-", p, edges)


def mul(a, b):
    if type(a) in _PLAIN and type(b) in _PLAIN:
        return a * b
    t, pa, da, pb, db = _split(a, b)
    p = mul(pa, pb)
    if t.mode == FORWARD:
        if da is None:
            d = mul(pa, db)
        elif db is None:
            d = mul(da, pb)
        else:
            d = add(mul(da, pb), mul(pa, db))
        return ForwardDual(t, p, d)
    edges = []
    if da is not None:
        edges.append((da, pb))
    if db is not None:
        edges.append((db, pa))
    return t.tape.record("*", p, edges)


def div(a, b):
    if type(a) in _PLAIN and type(b) in _PLAIN:
        return _plain_div(a, b)
    t, pa, da, pb, db = _split(a, b)
    if value_of(pb) == 0:
        raise DomainError("/", value_of(pa), 0,
                          message=f"division by exact zero: {value_of(pa)!r}/0")
    if type(value_of(pb)) is int:
        pb = _lift_real(pb)
    q = div(pa, pb)
    if t.mode == FORWARD:
        if db is None:
            d = div(da, pb)
        elif da is None:
            d = neg(div(mul(q, db), pb))
        else:
            d = div(sub(da, mul(q, db)), pb)
        return ForwardDual(t, q, d)
    edges = []
    if da is not None:
        edges.append((da, div(1.0, pb)))
    if db is not None:
        edges.append((db, neg(div(q, pb))))
    return t.tape.record("/", q, edges)


def _lift_real(v):
    """Promote the plain core of `v` to float (keeps tag layers)."""
    if isinstance(v, ForwardDual):
        return ForwardDual(v.tag, _lift_real(v.primal), v.tangent)
    if isinstance(v, ReverseTracer):
        return ReverseTracer(v.tag, v.node, _lift_real(v.primal))
    return float(v)


def pow_(a, b):
    if type(a) in _PLAIN and type(b) in _PLAIN:
        return _plain_pow(a, b)
    t, pa, da, pb, db = _split(a, b)
    p = pow_(pa, pb)
    # d/da a**b = b*a**(b-1);  d/db a**b = a**b * log(a)
    if da is not None:
        if value_of(pb) == 0:
            ga = 0.0
        else:
            ga = mul(pb, pow_(pa, sub(pb, 1)))
    if db is not None:
        base = value_of(pa)
        if base == 0:
            gb = 0.0
        elif base < 0:
            raise DomainError("**", base, value_of(pb),
                              message="derivative of a power with respect to its "
                                      f"exponent needs a positive base, got {base!r}")
        else:
            gb = mul(p, log(pa))
    if t.mode == FORWARD:
        if db is None:
            d = mul(da, ga)
        elif da is None:
            d = mul(db, gb)
        else:
            d = add(mul(da, ga), mul(db, gb))
        return ForwardDual(t, p, d)
    edges = []
    if da is not None:
        edges.append((da, ga))
    if db is not None:
        edges.append((db, gb))
    return t.tape.record("**", p, edges)


BINARY = {"+": add, "-": sub, "*": mul, "/": div, "**": pow_}


def apply_binary(op: str, lhs, rhs):
    return BINARY[op](lhs, rhs)


# -- unary primitives -----------------------------------------------------------

def neg(a):
    if type(a) in _PLAIN:
        return -a
    t = a.tag
    pa, da = _peel(a, t)
    p = neg(pa)
    if t.mode == FORWARD:
        return ForwardDual(t, p, neg(da))
    return t.tape.record("NEG", p, [(da, -1.0)])


def _plain_sqrt(x):
    if x < 0:
        raise DomainError("SQRT", x, message=f"SQRT of a negative number: {x!r}")
    return math.sqrt(x)


def _plain_exp(x):
    try:
        return math.exp(x)
    except OverflowError:
        raise DomainError("EXP", x, message=f"EXP overflow at {x!r}") from None


def _plain_log(x):
    if x <= 0:
        raise DomainError("LOG", x, message=f"LOG of a non-positive number: {x!r}")
    return math.log(x)


def _plain_gamma(x):
    if x <= 0 and x == math.floor(x):
        raise DomainError("GAMMA", x, message=f"GAMMA pole at non-positive integer {x!r}")
    try:
        return math.gamma(x)
    except OverflowError:
        raise DomainError("GAMMA", x, message=f"GAMMA overflow at {x!r}") from None


def _plain_lgamma(x):
    if x <= 0 and x == math.floor(x):
        raise DomainError("LGAMMA", x, message=f"LGAMMA pole at non-positive integer {x!r}")
    return math.lgamma(x)


def _plain_tan(x):
    return math.tan(x)


def _sign(x) -> float:
    return 1.0 if x > 0 else (-1.0 if x < 0 else 0.0)


def _unary(name, plain, deriv):
    """Build a primitive from its plain form and a derivative rule.

    `deriv(x, fx)` returns f'(x) using the lifted primitives, so it works
    for arguments carrying smaller tags.
    """

    def prim(a):
        if type(a) in _PLAIN:
            return plain(a)
        t = a.tag
        pa, da = _peel(a, t)
        p = prim(pa)
        g = deriv(pa, p)
        if t.mode == FORWARD:
            return ForwardDual(t, p, mul(da, g))
        return t.tape.record(name, p, [(da, g)])

    prim.__name__ = name.lower()
    return prim


sqrt = _unary("SQRT", _plain_sqrt, lambda x, fx: div(0.5, fx))
exp = _unary("EXP", _plain_exp, lambda x, fx: fx)
log = _unary("LOG", _plain_log, lambda x, fx: div(1.0, x))
sin = _unary("SIN", math.sin, lambda x, fx: cos(x))
cos = _unary("COS", math.cos, lambda x, fx: neg(sin(x)))
tan = _unary("TAN", _plain_tan, lambda x, fx: add(1.0, mul(fx, fx)))
atan = _unary("ATAN", math.atan, lambda x, fx: div(1.0, add(1.0, mul(x, x))))
abs_ = _unary("ABS", abs, lambda x, fx: _sign(value_of(x)))

_POLYGAMMA: dict[int, object] = {}


def polygamma_fn(n: int):
    fn = _POLYGAMMA.get(n)
    if fn is None:
        def plain(x, n=n):
            if x <= 0 and x == math.floor(x):
                raise DomainError(f"POLYGAMMA{n}", x,
                                  message=f"polygamma pole at non-positive integer {x!r}")
            return polygamma(n, x)

        fn = _unary(f"PSI{n}", plain, lambda x, fx, n=n: polygamma_fn(n + 1)(x))
        _POLYGAMMA[n] = fn
    return fn


digamma = polygamma_fn(0)
gamma = _unary("GAMMA", _plain_gamma, lambda x, fx: mul(fx, digamma(x)))
lgamma = _unary("LGAMMA", _plain_lgamma, lambda x, fx: digamma(x))

UNARY = {
    "NEG": neg, "SQRT": sqrt, "EXP": exp, "LOG": log, "SIN": sin, "COS": cos,
    "TAN": tan, "ATAN": atan, "ABS": abs_, "GAMMA": gamma, "LGAMMA": lgamma,
}


def apply_unary(name: str, arg):
    return UNARY[name](arg)


def minimum(*args):
    # selection passes the chosen argument's derivative through; ties pick the first
    best = args[0]
    for a in args[1:]:
        if value_of(a) < value_of(best):
            best = a
    return best


def maximum(*args):
    best = args[0]
    for a in args[1:]:
        if value_of(a) > value_of(best):
            best = a
    return best


# -- tag extraction and removal -------------------------------------------------

def tangent_of(v, tag: Tag):
    """Tangent of `v` along the forward tag; zero when v does not carry it."""
    if not isinstance(v, _TAGGED) or v.tag.id < tag.id:
        return 0.0
    if v.tag is tag:
        return v.tangent
    if isinstance(v, ForwardDual):
        # a larger tag outside: the tangent is itself dual in that tag
        p = tangent_of(v.primal, tag)
        d = tangent_of(v.tangent, tag)
        return ForwardDual(v.tag, p, d)
    raise FarRuntimeError(f"cannot read TANGENT through an active reverse tag {v.tag.id}")


def strip(v, tag: Tag):
    """Remove layer `tag` from `v`, keeping everything else."""
    if not isinstance(v, _TAGGED) or v.tag.id < tag.id:
        return v
    if v.tag is tag:
        return v.primal
    if isinstance(v, ForwardDual):
        return ForwardDual(v.tag, strip(v.primal, tag), strip(v.tangent, tag))
    return ReverseTracer(v.tag, v.node, strip(v.primal, tag))


def promote(v):
    """Integers become reals; used when a variable turns into an AD input."""
    if type(v) is int or type(v) is bool:
        return float(v)
    return _lift_real(v) if isinstance(v, _TAGGED) else v


# -- reverse sweep --------------------------------------------------------------

def reverse_sweep(tape: Tape, seeds) -> list:
    """Propagate seed adjoints backwards; returns adjoints indexed by node id."""
    if tape.swept:
        raise FarRuntimeError(f"tape {tape.tag.id} has already been swept")
    n = len(tape.nodes)
    adj: list = [None] * n
    for nid, seed in seeds:
        if not 0 <= nid < n:
            raise FarRuntimeError(f"invalid seed node id {nid} for a tape of {n} nodes")
        adj[nid] = seed if adj[nid] is None else add(adj[nid], seed)
    nodes = tape.nodes
    for i in range(n - 1, -1, -1):
        tape.visits += 1
        a = adj[i]
        if a is None:
            continue
        node = nodes[i]
        node.adjoint = a
        for inp, partial in zip(node.inputs, node.partials):
            c = mul(a, partial)
            prev = adj[inp]
            adj[inp] = c if prev is None else add(prev, c)
    tape.swept = True
    return [0.0 if a is None else a for a in adj]
