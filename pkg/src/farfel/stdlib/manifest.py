"""The line-oriented corpus manifest and the checker behind `verify`."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from ..api import load
from ..diagnostics import FarfelError
from ..frontend import parse_source
from ..interp import run_program
from ..sema import analyze
from . import MANIFEST, swap_mode


class ManifestError(ValueError):
    pass


@dataclass
class Expectation:
    name: str
    value: float
    tol: float
    provenance: str


@dataclass
class CorpusEntry:
    name: str
    path: Path
    inputs: list = field(default_factory=list)  # [(name, value)]
    expected: list = field(default_factory=list)  # [Expectation]
    iters: int | None = None

    def overrides(self) -> dict:
        out = dict(self.inputs)
        if self.iters is not None:
            out["N"] = self.iters
        return out


@dataclass
class Check:
    entry: str
    name: str
    expected: float
    got: float | None
    tol: float
    ok: bool
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.ok else "FAIL"
        got = "missing" if self.got is None else format(self.got, ".17g")
        extra = f" ({self.note})" if self.note else ""
        return (f"{status} {self.entry}.{self.name}: got {got}, expected "
                f"{self.expected!r} +/- {self.tol:g}{extra}")


def parse_number(text: str):
    try:
        return int(text)
    except ValueError:
        return float(text)


def parse_manifest(text: str, base: Path) -> list[CorpusEntry]:
    entries: list[CorpusEntry] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = (p.strip() for p in line.partition("="))
        if not sep:
            raise ManifestError(f"line {lineno}: expected KEY = VALUE")
        if key == "entry":
            entries.append(CorpusEntry(value, base))
            continue
        if not entries:
            raise ManifestError(f"line {lineno}: {key} before the first entry")
        e = entries[-1]
        try:
            if key == "path":
                e.path = base / value
            elif key == "set":
                name, _, v = value.partition("=")
                e.inputs.append((name.strip().upper(), parse_number(v.strip())))
            elif key == "iters":
                e.iters = int(value)
            elif key == "expect":
                name, v, tol, prov = value.split()
                e.expected.append(Expectation(name.upper(), float(v), float(tol), prov))
            else:
                raise ManifestError(f"line {lineno}: unknown key {key!r}")
        except ValueError as err:
            if isinstance(err, ManifestError):
                raise
            raise ManifestError(f"line {lineno}: malformed {key}: {value!r}") from None
    for e in entries:
        if e.path == base:
            raise ManifestError(f"entry {e.name} has no path")
    return entries


def load_manifest(path: Path | str = MANIFEST) -> list[CorpusEntry]:
    path = Path(path)
    return parse_manifest(path.read_text(), path.parent)


def run_entry(entry: CorpusEntry, mode: str | None = None):
    source = entry.path.read_text()
    if mode is None:
        bound = load(source)
    else:
        bound = analyze(swap_mode(parse_source(source), mode))
    return run_program(bound, entry.overrides())


def printed_values(result) -> dict:
    out: dict = {}
    for r in result.records:
        out[r["name"]] = r["value"]
    return out


def verify_entry(entry: CorpusEntry, mode: str | None = None) -> list[Check]:
    try:
        result = run_entry(entry, mode)
    except (FarfelError, OSError) as err:
        return [Check(entry.name, x.name, x.value, None, x.tol, False, str(err))
                for x in entry.expected]
    if result.error is not None:
        return [Check(entry.name, x.name, x.value, None, x.tol, False,
                      str(result.error)) for x in entry.expected]
    got = printed_values(result)
    checks = []
    for x in entry.expected:
        v = got.get(x.name)
        ok = v is not None and math.isfinite(v) and abs(v - x.value) <= x.tol
        checks.append(Check(entry.name, x.name, x.value, v, x.tol, ok))
    return checks
