"""Interpreter and runtime AD engine for a small Fortran dialect with
forward (ADF) and reverse (ADR) differentiation blocks and nested,
lexically scoped subprograms."""

__version__ = "0.1.0"
