"""Structured errors shared by every phase of the toolchain."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    phase: str
    line: int
    col: int
    message: str
    file: str = "<input>"

    def render(self) -> str:
        return f"{self.file}:{self.line}:{self.col}: {self.phase}: {self.message}"

    def __str__(self) -> str:
        return self.render()


class FarfelError(Exception):
    """Base class; every instance carries one Diagnostic."""

    phase = "error"

    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(message)
        self.message = message
        self.line = line
        self.col = col

    @property
    def located(self) -> bool:
        return self.line > 0

    def at(self, line: int, col: int) -> "FarfelError":
        if not self.located:
            self.line, self.col = line, col
        return self

    def diagnostic(self, file: str = "<input>") -> Diagnostic:
        return Diagnostic(self.phase, self.line, self.col, self.message, file)

    def __str__(self) -> str:
        return self.diagnostic().render()


class LexError(FarfelError):
    phase = "lex"


class ParseError(FarfelError):
    phase = "parse"

    def __init__(self, message: str, line: int, col: int, expected: str = "", found: str = ""):
        super().__init__(message, line, col)
        self.expected = expected
        self.found = found


class SemaError(FarfelError):
    """Raised when sema found problems; `diagnostics` holds all of them."""

    phase = "sema"

    def __init__(self, diagnostics: list[Diagnostic]):
        first = diagnostics[0]
        super().__init__(first.message, first.line, first.col)
        self.diagnostics = diagnostics


class FarRuntimeError(FarfelError):
    phase = "runtime"


class DomainError(FarRuntimeError):
    """Arithmetic outside an operation's domain (log of a negative, 0/0, ...)."""

    def __init__(self, op: str, *operands, message: str | None = None):
        if message is None:
            shown = ", ".join(format(o, ".17g") for o in operands)
            message = f"domain error in {op}({shown})"
        super().__init__(message)
        self.op = op
        self.operands = operands
