"""Convenience entry points: source text in, bound program or results out."""

from __future__ import annotations

from .frontend import parse_source
from .interp import Array, Interpreter, RunResult, run_deep, run_program
from .sema import BoundProgram, analyze


def load(source: str) -> BoundProgram:
    """Parse and analyze; raises LexError, ParseError or SemaError."""
    return analyze(parse_source(source))


def run_source(source: str, overrides=(), tape_hook=None) -> RunResult:
    return run_program(load(source), overrides, tape_hook=tape_hook)


class Session:
    """Call the subprograms of a source file directly from Python.

    >>> s = Session("FUNCTION SQ(X)\\n  SQ = X*X\\nEND\\n")
    >>> s.call("SQ", 3.0)
    9.0
    """

    def __init__(self, source: str):
        self.bound = load(source)
        self.interp = Interpreter(self.bound)

    def fn(self, name: str):
        """A top-level subprogram or intrinsic as a value to pass along."""
        return self.interp.subprogram(name)

    @staticmethod
    def array(values) -> Array:
        return Array([v for v in values])

    def call(self, name: str, *args):
        return run_deep(self.interp.call, name, *args)

    @property
    def engine(self):
        return self.interp.engine
