"""The shipped corpus of `.far` programs and its reusable library units.

Library units live in `corpus/lib`, one subprogram per file.  Corpus
programs are self-contained: each carries verbatim copies of the library
units it calls, so `swap_mode` can exchange the forward and reverse
variants of DERIV1 and GRAD by replacing whole units.
"""

from __future__ import annotations

from dataclasses import replace
from pathlib import Path

from ..frontend import format_program, nodes as N, parse_source

CORPUS_DIR = Path(__file__).parent / "corpus"
LIB_DIR = CORPUS_DIR / "lib"
MANIFEST = Path(__file__).parent / "corpus.manifest"

VARIANTS = {
    "forward": {"DERIV1": "deriv1f", "GRAD": "gradf"},
    "reverse": {"DERIV1": "deriv1r", "GRAD": "gradr"},
}


def program_paths() -> list[Path]:
    return sorted(CORPUS_DIR.glob("*.far"))


def library_paths() -> list[Path]:
    return sorted(LIB_DIR.glob("*.far"))


def corpus_paths() -> list[Path]:
    return program_paths() + library_paths()


def read_program(name: str) -> str:
    return (CORPUS_DIR / f"{name}.far").read_text()


def library_unit(name: str) -> N.Subprogram:
    program = parse_source((LIB_DIR / f"{name}.far").read_text())
    (unit,) = program.units
    return unit


def swap_mode(program: N.Program, mode: str) -> N.Program:
    """Replace DERIV1/GRAD units by the chosen variant; other units are kept."""
    chosen = {name: library_unit(lib) for name, lib in VARIANTS[mode].items()}
    return replace(program, units=[chosen.get(u.name, u) for u in program.units])


def swap_source(source: str, mode: str) -> str:
    return format_program(swap_mode(parse_source(source), mode))
