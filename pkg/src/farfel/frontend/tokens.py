"""Free-form, line-oriented lexer.

`!` starts a comment, a trailing `&` joins the next line, and identifiers
and keywords are case-insensitive (stored uppercased).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..diagnostics import LexError

KEYWORD = "keyword"
IDENT = "identifier"
NUMBER = "number-literal"
OP = "operator"
PUNCT = "punctuation"
EOL = "end-of-line"
EOF = "end-of-file"

KEYWORDS = frozenset(
    """PROGRAM FUNCTION SUBROUTINE END DIMENSION CALL IF THEN ELSE ENDIF DO
    ENDDO PRINT RETURN ADF ADR TANGENT COTANGENT""".split()
)

DOT_OPS = frozenset(
    [".LT.", ".LE.", ".GT.", ".GE.", ".EQ.", ".NE.", ".AND.", ".OR.", ".NOT."]
)

_SYMBOL_OPS = {"<=": ".LE.", ">=": ".GE.", "==": ".EQ.", "/=": ".NE.", "<": ".LT.", ">": ".GT."}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<number>(?:\d+\.(?![A-Za-z]+\.)\d*|\d*\.\d+|\d+)(?:[EeDd][+-]?\d+)?)
  | (?P<dotop>\.[A-Za-z]+\.)
  | (?P<name>[A-Za-z][A-Za-z0-9_]*)
  | (?P<op>\*\*|<=|>=|==|/=|[-+*/=<>])
  | (?P<punct>[(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    lexeme: str
    line: int
    column: int

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.lexeme!r}, {self.line}:{self.column})"


def _strip_comment(text: str) -> str:
    at = text.find("!")
    return text if at < 0 else text[:at]


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    continuing = False
    pending = False  # the current logical line has produced tokens
    last_pos = (1, 1)
    for lineno, raw in enumerate(source.split("\n"), start=1):
        text = _strip_comment(raw).rstrip()
        pos = 0
        if continuing:
            lead = len(text) - len(text.lstrip())
            if text[lead:lead + 1] == "&":
                pos = lead + 1
        cont_here = text.endswith("&")
        end = len(text) - 1 if cont_here else len(text)
        while pos < end:
            m = _TOKEN_RE.match(text, pos, end)
            if m is None:
                raise LexError(f"invalid character {text[pos]!r}", lineno, pos + 1)
            kind = m.lastgroup
            lexeme = m.group()
            col = pos + 1
            pos = m.end()
            if kind == "ws":
                continue
            pending = True
            last_pos = (lineno, pos)
            if kind == "number":
                tokens.append(Token(NUMBER, lexeme.upper(), lineno, col))
            elif kind == "name":
                word = lexeme.upper()
                tokens.append(Token(KEYWORD if word in KEYWORDS else IDENT, word, lineno, col))
            elif kind == "dotop":
                word = lexeme.upper()
                if word not in DOT_OPS:
                    raise LexError(f"unknown operator {lexeme}", lineno, col)
                tokens.append(Token(OP, word, lineno, col))
            elif kind == "op":
                tokens.append(Token(OP, _SYMBOL_OPS.get(lexeme, lexeme), lineno, col))
            else:
                tokens.append(Token(PUNCT, lexeme, lineno, col))
        continuing = cont_here
        if not continuing and pending:
            # EOL sits on the line's last significant character
            tokens.append(Token(EOL, "", *last_pos))
            pending = False
    if pending:
        tokens.append(Token(EOL, "", *last_pos))
    tokens.append(Token(EOF, "", *last_pos))
    return tokens
