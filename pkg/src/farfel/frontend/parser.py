"""Recursive-descent parser producing the AST in `nodes`.

Expressions use precedence climbing with Fortran's ordering: `**` is
right-associative and binds tighter than unary minus.  `NAME(i)` is an
ArrayRef when NAME is dimensioned in an enclosing scope and a Call
otherwise; that classification runs once a top-level unit is complete so
DIMENSION statements may follow nested definitions that use the array.
"""

from __future__ import annotations

from ..diagnostics import ParseError
from . import nodes as N
from .tokens import EOF, EOL, IDENT, KEYWORD, NUMBER, OP, PUNCT, Token, tokenize

_RELOPS = {".LT.", ".LE.", ".GT.", ".GE.", ".EQ.", ".NE."}
_UNIT_KINDS = ("PROGRAM", "FUNCTION", "SUBROUTINE")


def _describe(tok: Token) -> str:
    if tok.kind == EOL:
        return "end of line"
    if tok.kind == EOF:
        return "end of file"
    return repr(tok.lexeme)


def _number(text: str):
    if any(c in text for c in ".ED"):
        return float(text.replace("D", "E"))
    return int(text)


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        # kind of Deriv allowed while parsing a spec list (None: any)
        self._spec_mode: str | None = None

    # -- token helpers -----------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        return self.tokens[min(self.pos + ahead, len(self.tokens) - 1)]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != EOF:
            self.pos += 1
        return tok

    def at(self, lexeme: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.lexeme == lexeme and tok.kind in (KEYWORD, OP, PUNCT)

    def error(self, expected: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        found = _describe(tok)
        return ParseError(f"expected {expected}, found {found}", tok.line, tok.column,
                          expected, found)

    def expect(self, lexeme: str) -> Token:
        if not self.at(lexeme):
            raise self.error(repr(lexeme))
        return self.advance()

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind != IDENT:
            raise self.error("a name")
        return self.advance()

    def expect_eol(self) -> None:
        tok = self.peek()
        if tok.kind == EOF:
            return
        if tok.kind != EOL:
            raise self.error("end of line")
        self.advance()

    # -- program units -----------------------------------------------------

    def parse_program(self) -> N.Program:
        units = []
        while self.peek().kind != EOF:
            tok = self.peek()
            if tok.kind == KEYWORD and tok.lexeme in _UNIT_KINDS:
                unit = self.parse_subprogram()
                _classify_refs(unit, [])
                units.append(unit)
            else:
                raise self.error("PROGRAM, FUNCTION or SUBROUTINE")
        if not units:
            tok = self.peek()
            raise ParseError("expected at least one program unit, found end of file",
                             tok.line, tok.column, "program unit", "end of file")
        return N.Program(units)

    def parse_subprogram(self) -> N.Subprogram:
        head = self.advance()
        kind = head.lexeme
        name = self.expect_ident().lexeme
        params: list[str] = []
        if kind != "PROGRAM" and self.at("("):
            self.advance()
            if not self.at(")"):
                params.append(self.expect_ident().lexeme)
                while self.at(","):
                    self.advance()
                    params.append(self.expect_ident().lexeme)
            self.expect(")")
        elif kind == "FUNCTION":
            raise self.error("'(' after function name")
        self.expect_eol()
        body = self.parse_body(allow_defs=True)
        end = self.peek()
        if not self.at("END"):
            raise self.error(f"END of {kind} {name}")
        self.advance()
        nxt = self.peek()
        if nxt.kind == KEYWORD and nxt.lexeme in _UNIT_KINDS:
            if nxt.lexeme != kind:
                raise self.error(f"END {kind}", nxt)
            self.advance()
            if self.peek().kind == IDENT:
                closer = self.advance()
                if closer.lexeme != name:
                    raise self.error(f"name {name}", closer)
        elif nxt.kind not in (EOL, EOF):
            raise self.error(f"END of {kind} {name}", end)
        self.expect_eol()
        return N.Subprogram(kind, name, params, body, head.line, head.column)

    # -- statements --------------------------------------------------------

    def _at_terminator(self) -> bool:
        tok = self.peek()
        return tok.kind == EOF or (
            tok.kind == KEYWORD and tok.lexeme in ("END", "ELSE", "ENDIF", "ENDDO")
        )

    def parse_body(self, allow_defs: bool = False) -> list:
        stmts = []
        while not self._at_terminator():
            tok = self.peek()
            if tok.kind == EOL:
                self.advance()
                continue
            if tok.kind == KEYWORD and tok.lexeme in ("FUNCTION", "SUBROUTINE"):
                if not allow_defs:
                    raise ParseError(
                        "nested subprograms must be defined directly in a subprogram body",
                        tok.line, tok.column, "statement", tok.lexeme)
                sub = self.parse_subprogram()
                stmts.append(N.SubprogramDef(sub, tok.line, tok.column))
                continue
            stmts.append(self.parse_statement())
        return stmts

    def parse_statement(self):
        tok = self.peek()
        if tok.kind == IDENT:
            return self.parse_assignment()
        if tok.kind != KEYWORD:
            raise self.error("a statement")
        kw = tok.lexeme
        if kw == "IF":
            return self.parse_if()
        if kw == "DO":
            return self.parse_do()
        if kw in ("ADF", "ADR"):
            return self.parse_ad_block()
        self.advance()
        if kw == "CALL":
            name = self.expect_ident().lexeme
            args = self.parse_args() if self.at("(") else []
            self.expect_eol()
            return N.CallStmt(name, args, tok.line, tok.column)
        if kw == "PRINT":
            items = []
            if self.at("*"):
                self.advance()
                if self.at(","):
                    self.advance()
                elif self.peek().kind not in (EOL, EOF):
                    raise self.error("',' after PRINT *")
            if self.peek().kind not in (EOL, EOF):
                items.append(self.parse_expr())
                while self.at(","):
                    self.advance()
                    items.append(self.parse_expr())
            self.expect_eol()
            return N.Print(items, tok.line, tok.column)
        if kw == "RETURN":
            self.expect_eol()
            return N.Return(tok.line, tok.column)
        if kw == "DIMENSION":
            decls = [self.parse_dim_decl()]
            while self.at(","):
                self.advance()
                decls.append(self.parse_dim_decl())
            self.expect_eol()
            return N.Dimension(decls, tok.line, tok.column)
        if kw == "PROGRAM":
            raise ParseError("PROGRAM units cannot be nested", tok.line, tok.column,
                             "statement", "PROGRAM")
        raise ParseError(f"unexpected {kw}", tok.line, tok.column, "statement", kw)

    def parse_dim_decl(self):
        name = self.expect_ident().lexeme
        self.expect("(")
        extent = self.parse_expr()
        self.expect(")")
        return (name, extent)

    def parse_assignment(self):
        target = self.parse_target()
        self.expect("=")
        expr = self.parse_expr()
        self.expect_eol()
        return N.Assign(target, expr, target.line, target.col)

    def parse_target(self):
        tok = self.expect_ident()
        if self.at("("):
            self.advance()
            index = self.parse_expr()
            self.expect(")")
            return N.ArrayRef(tok.lexeme, index, tok.line, tok.column)
        return N.Var(tok.lexeme, tok.line, tok.column)

    def parse_if(self):
        tok = self.advance()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        if not self.at("THEN"):
            # logical IF: one statement on the same line
            stmt = self.parse_statement()
            return N.If(cond, [stmt], [], tok.line, tok.column)
        self.advance()
        self.expect_eol()
        then = self.parse_body()
        orelse: list = []
        if self.at("ELSE"):
            else_tok = self.advance()
            if self.at("IF"):
                orelse = [self.parse_if_chain(else_tok)]
                return N.If(cond, then, orelse, tok.line, tok.column)
            self.expect_eol()
            orelse = self.parse_body()
        self.parse_block_end("IF", "ENDIF")
        return N.If(cond, then, orelse, tok.line, tok.column)

    def parse_if_chain(self, else_tok: Token):
        # ELSE IF (...) THEN shares the chain's single END IF
        tok = self.advance()
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        self.expect("THEN")
        self.expect_eol()
        then = self.parse_body()
        orelse: list = []
        if self.at("ELSE"):
            nxt = self.advance()
            if self.at("IF"):
                return N.If(cond, then, [self.parse_if_chain(nxt)], tok.line, tok.column)
            self.expect_eol()
            orelse = self.parse_body()
        self.parse_block_end("IF", "ENDIF")
        return N.If(cond, then, orelse, tok.line, tok.column)

    def parse_block_end(self, word: str, fused: str) -> None:
        if self.at(fused):
            self.advance()
        elif self.at("END") and self.at(word, 1):
            self.advance()
            self.advance()
        else:
            raise self.error(f"END {word}")
        self.expect_eol()

    def parse_do(self):
        tok = self.advance()
        var = self.expect_ident().lexeme
        self.expect("=")
        lo = self.parse_expr()
        self.expect(",")
        hi = self.parse_expr()
        step = None
        if self.at(","):
            self.advance()
            step = self.parse_expr()
        self.expect_eol()
        body = self.parse_body()
        self.parse_block_end("DO", "ENDDO")
        return N.DoLoop(var, lo, hi, step, body, tok.line, tok.column)

    # -- AD blocks ---------------------------------------------------------

    def parse_ad_block(self):
        tok = self.advance()
        kw = tok.lexeme
        mode = N.FORWARD if kw == "ADF" else N.REVERSE
        opening = self.parse_spec_list(mode, opening=True)
        self.expect_eol()
        body = self.parse_body()
        end = self.peek()
        if not self.at("END"):
            raise self.error(f"END {kw}(...)")
        self.advance()
        closer = self.peek()
        if closer.kind == KEYWORD and closer.lexeme in ("ADF", "ADR"):
            if closer.lexeme != kw:
                raise ParseError(
                    f"{kw} block opened at line {tok.line} is closed by END {closer.lexeme}",
                    closer.line, closer.column, f"END {kw}", f"END {closer.lexeme}")
            self.advance()
        else:
            raise ParseError(
                f"{kw} block opened at line {tok.line} is not closed by END {kw}(...)",
                end.line, end.column, f"END {kw}", _describe(end))
        if not self.at("("):
            raise ParseError(f"END {kw} needs a closing spec list in parentheses",
                             closer.line, closer.column, "'('", _describe(self.peek()))
        closing = self.parse_spec_list(mode, opening=False)
        self.expect_eol()
        return N.AdBlock(mode, opening, body, closing, tok.line, tok.column)

    def parse_spec_list(self, mode: str, opening: bool) -> list:
        saved = self._spec_mode
        self._spec_mode = "TANGENT" if mode == N.FORWARD else "COTANGENT"
        try:
            start = self.expect("(")
            elems = self._spec_elements()
            self.expect(")")
            return self._assemble_specs(elems, start, mode, opening, grouped=False)
        finally:
            self._spec_mode = saved

    def _spec_elements(self) -> list:
        # each element: ("group", token, elems) | ("bind", lhs, rhs) | ("bare", expr)
        elems = []
        while True:
            tok = self.peek()
            if self.at("("):
                self.advance()
                inner = self._spec_elements()
                self.expect(")")
                elems.append(("group", tok, inner))
            else:
                lhs = self.parse_expr()
                if self.at("="):
                    self.advance()
                    elems.append(("bind", lhs, self.parse_expr()))
                else:
                    elems.append(("bare", lhs))
            if not self.at(","):
                return elems
            self.advance()

    def _assemble_specs(self, elems, start: Token, mode, opening, grouped) -> list:
        ido = None
        if (len(elems) >= 2 and elems[-1][0] == "bare" and elems[-2][0] == "bind"
                and isinstance(elems[-2][1], N.Var)):
            var = elems[-2][1]
            ido = N.ImpliedDo(var.name, elems[-2][2], elems[-1][1], var.line, var.col)
            elems = elems[:-2]
            if not elems:
                raise ParseError("implied-DO with no spec bindings", var.line, var.col,
                                 "spec binding", "implied-DO")
        if grouped and ido is None:
            raise ParseError("parenthesized spec group needs an implied-DO 'I = lo, hi'",
                             start.line, start.column, "implied-DO", "')'")
        specs = []
        plain = []
        for el in elems:
            if el[0] == "group":
                if ido is not None:
                    raise ParseError("nested implied-DO groups are not supported",
                                     el[1].line, el[1].column, "spec binding", "'('")
                specs.extend(self._assemble_specs(el[2], el[1], mode, opening, grouped=True))
            elif el[0] == "bare":
                e = el[1]
                raise ParseError("expected '=' in AD spec binding", e.line, e.col, "'='",
                                 "',' or ')'")
            else:
                plain.append(self._binding(el[1], el[2], mode, opening))
        if ido is not None:
            specs.append(N.AdSpec(plain, ido, start.line, start.column))
        else:
            specs.extend(N.AdSpec([b], None, b.line, b.col) for b in plain)
        return specs

    def _binding(self, lhs, rhs, mode, opening):
        word = "TANGENT" if mode == N.FORWARD else "COTANGENT"
        kw = "ADF" if mode == N.FORWARD else "ADR"
        if opening:
            if not isinstance(lhs, N.Deriv):
                raise ParseError(f"{kw} opening spec must assign {word}(variable)",
                                 lhs.line, lhs.col, f"{word}(...)", "variable")
        elif isinstance(lhs, N.Call) and len(lhs.args) == 1:
            lhs = N.ArrayRef(lhs.name, lhs.args[0], lhs.line, lhs.col)
        elif not isinstance(lhs, (N.Var, N.ArrayRef)):
            raise ParseError(f"END {kw} spec must assign a variable",
                             lhs.line, lhs.col, "variable", "expression")
        return N.SpecBinding(lhs, rhs, lhs.line, lhs.col)

    # -- expressions -------------------------------------------------------

    def parse_args(self) -> list:
        self.expect("(")
        args = []
        if not self.at(")"):
            args.append(self.parse_expr())
            while self.at(","):
                self.advance()
                args.append(self.parse_expr())
        self.expect(")")
        return args

    def parse_expr(self):
        return self.parse_or()

    def parse_or(self):
        lhs = self.parse_and()
        while self.at(".OR."):
            tok = self.advance()
            lhs = N.Binary(".OR.", lhs, self.parse_and(), tok.line, tok.column)
        return lhs

    def parse_and(self):
        lhs = self.parse_not()
        while self.at(".AND."):
            tok = self.advance()
            lhs = N.Binary(".AND.", lhs, self.parse_not(), tok.line, tok.column)
        return lhs

    def parse_not(self):
        if self.at(".NOT."):
            tok = self.advance()
            return N.Unary(".NOT.", self.parse_not(), tok.line, tok.column)
        return self.parse_comparison()

    def parse_comparison(self):
        lhs = self.parse_additive()
        tok = self.peek()
        if tok.kind == OP and tok.lexeme in _RELOPS:
            self.advance()
            lhs = N.Binary(tok.lexeme, lhs, self.parse_additive(), tok.line, tok.column)
        return lhs

    def parse_additive(self):
        lhs = self.parse_term()
        while self.at("+") or self.at("-"):
            tok = self.advance()
            lhs = N.Binary(tok.lexeme, lhs, self.parse_term(), tok.line, tok.column)
        return lhs

    def parse_term(self):
        lhs = self.parse_unary()
        while self.at("*") or self.at("/"):
            tok = self.advance()
            lhs = N.Binary(tok.lexeme, lhs, self.parse_unary(), tok.line, tok.column)
        return lhs

    def parse_unary(self):
        if self.at("-"):
            tok = self.advance()
            return N.Unary("NEG", self.parse_unary(), tok.line, tok.column)
        if self.at("+"):
            self.advance()
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self):
        base = self.parse_primary()
        if self.at("**"):
            tok = self.advance()
            return N.Binary("**", base, self.parse_unary(), tok.line, tok.column)
        return base

    def parse_primary(self):
        tok = self.peek()
        if tok.kind == NUMBER:
            self.advance()
            return N.Num(_number(tok.lexeme), tok.line, tok.column)
        if tok.kind == IDENT:
            self.advance()
            if self.at("("):
                return N.Call(tok.lexeme, self.parse_args(), tok.line, tok.column)
            return N.Var(tok.lexeme, tok.line, tok.column)
        if tok.kind == KEYWORD and tok.lexeme in ("TANGENT", "COTANGENT"):
            self.advance()
            if self._spec_mode is not None and tok.lexeme != self._spec_mode:
                kind = "forward (ADF)" if self._spec_mode == "TANGENT" else "reverse (ADR)"
                raise ParseError(f"{tok.lexeme} spec in a {kind} block", tok.line,
                                 tok.column, self._spec_mode, tok.lexeme)
            self.expect("(")
            target = self.parse_target()
            self.expect(")")
            return N.Deriv(tok.lexeme, target, tok.line, tok.column)
        if self.at("("):
            self.advance()
            inner = self.parse_expr()
            self.expect(")")
            return inner
        raise self.error("an expression")


def parse_program(tokens: list[Token]) -> N.Program:
    return Parser(tokens).parse_program()


def parse_ad_block(tokens: list[Token]) -> N.AdBlock:
    """Parse one ADF/ADR block starting at the first token."""
    p = Parser(tokens)
    if not (p.at("ADF") or p.at("ADR")):
        raise p.error("ADF or ADR")
    return p.parse_ad_block()


def parse_source(source: str) -> N.Program:
    return parse_program(tokenize(source))


# -- ArrayRef / Call classification ------------------------------------------

def _classify_refs(sub: N.Subprogram, outer: list) -> None:
    scope: dict[str, str] = {}
    for p in sub.params:
        scope[p] = "scalar"
    if sub.kind == "FUNCTION":
        scope[sub.name] = "scalar"
    for inner in sub.nested:
        scope[inner.name] = "sub"
    for name, _ in sub.dimension_decls:
        scope[name] = "array"
    scopes = [scope] + outer

    def is_array(name: str) -> bool:
        for s in scopes:
            if name in s:
                return s[name] == "array"
        return False

    def fix(e):
        if isinstance(e, N.Call):
            args = [fix(a) for a in e.args]
            if len(args) == 1 and is_array(e.name):
                return N.ArrayRef(e.name, args[0], e.line, e.col)
            e.args = args
            return e
        if isinstance(e, N.ArrayRef):
            e.index = fix(e.index)
        elif isinstance(e, N.Unary):
            e.operand = fix(e.operand)
        elif isinstance(e, N.Binary):
            e.lhs = fix(e.lhs)
            e.rhs = fix(e.rhs)
        elif isinstance(e, N.Deriv):
            e.target = fix(e.target)
        return e

    def fix_specs(specs):
        for spec in specs:
            for b in spec.bindings:
                b.lhs = fix(b.lhs)
                b.rhs = fix(b.rhs)
            if spec.implied_do is not None:
                spec.implied_do.lo = fix(spec.implied_do.lo)
                spec.implied_do.hi = fix(spec.implied_do.hi)

    def fix_stmts(stmts):
        for s in stmts:
            if isinstance(s, N.Assign):
                s.target = fix(s.target)
                s.expr = fix(s.expr)
            elif isinstance(s, N.CallStmt):
                s.args = [fix(a) for a in s.args]
            elif isinstance(s, N.If):
                s.cond = fix(s.cond)
                fix_stmts(s.then)
                fix_stmts(s.orelse)
            elif isinstance(s, N.DoLoop):
                s.lo, s.hi = fix(s.lo), fix(s.hi)
                if s.step is not None:
                    s.step = fix(s.step)
                fix_stmts(s.body)
            elif isinstance(s, N.Print):
                s.items = [fix(e) for e in s.items]
            elif isinstance(s, N.Dimension):
                s.decls = [(n, fix(x)) for n, x in s.decls]
            elif isinstance(s, N.AdBlock):
                fix_specs(s.opening)
                fix_stmts(s.body)
                fix_specs(s.closing)
            elif isinstance(s, N.SubprogramDef):
                _classify_refs(s.sub, scopes)

    fix_stmts(sub.body)
