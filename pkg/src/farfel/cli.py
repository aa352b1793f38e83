"""Command-line driver.

Exit codes: 0 success, 2 parse or sema error (or unreadable file),
3 runtime error, 4 verification failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .api import load
from .diagnostics import Diagnostic, FarfelError, SemaError
from .frontend import format_program, parse_source
from .interp import program_variables, run_program
from .stdlib.manifest import ManifestError, load_manifest, parse_number, verify_entry

EXIT_OK = 0
EXIT_COMPILE = 2
EXIT_RUNTIME = 3
EXIT_VERIFY = 4
EXIT_USAGE = 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="farfel", description="Run and check programs with ADF/ADR blocks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    run = sub.add_parser("run", help="execute a program and print its output")
    run.add_argument("file")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="NAME=VALUE", help="pin a PROGRAM variable (repeatable)")
    run.add_argument("--iters", type=int, metavar="N", help="pin the PROGRAM variable N")
    run.add_argument("--format", choices=("text", "structured"), default="text")
    verify = sub.add_parser("verify", help="check every corpus entry in a manifest")
    verify.add_argument("manifest")
    dump_ast = sub.add_parser("dump-ast", help="pretty-print the parsed program")
    dump_ast.add_argument("file")
    dump_tape = sub.add_parser("dump-tape", help="run and print every ADR tape")
    dump_tape.add_argument("file")
    return p


def _report(diags: list[Diagnostic], file: str) -> None:
    for d in diags:
        print(Diagnostic(d.phase, d.line, d.col, d.message, file).render(), file=sys.stderr)


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as err:
        reason = err.strerror if isinstance(err, OSError) and err.strerror else str(err)
        raise _IOFailure(Diagnostic("io", 1, 1, f"cannot read {path}: {reason}", path))


class _IOFailure(Exception):
    def __init__(self, diag: Diagnostic):
        super().__init__(diag.message)
        self.diag = diag


def _compile(path: str, source: str):
    try:
        return load(source)
    except SemaError as err:
        _report(err.diagnostics, path)
    except FarfelError as err:
        _report([err.diagnostic(path)], path)
    return None


def _overrides(args, bound) -> dict:
    names = program_variables(bound)
    out: dict = {}
    for item in args.overrides:
        name, sep, value = item.partition("=")
        name = name.strip().upper()
        if not sep or not name:
            raise UsageError(f"--set expects NAME=VALUE, got {item!r}")
        try:
            out[name] = parse_number(value.strip())
        except ValueError:
            raise UsageError(f"--set {name}: {value!r} is not a number") from None
        if name not in names:
            raise UsageError(f"--set {name}: not a variable of the PROGRAM unit")
    if args.iters is not None:
        if args.iters < 1:
            raise UsageError(f"--iters must be a positive integer, got {args.iters}")
        if "N" in names:
            out["N"] = args.iters
    return out


def cmd_run(args, tapes: bool = False) -> int:
    source = _read(args.file)
    bound = _compile(args.file, source)
    if bound is None:
        return EXIT_COMPILE
    overrides = _overrides(args, bound) if not tapes else {}
    dumped: list = []
    result = run_program(bound, overrides, tape_hook=dumped.append if tapes else None)
    if tapes:
        for tape in dumped:
            print(f"tape {tape.tag.id} ({len(tape)} nodes)")
            for line in tape.dump():
                print(line)
    elif args.format == "structured":
        sys.stdout.write(result.structured())
    else:
        sys.stdout.write(result.output)
    sys.stdout.flush()
    if result.error is not None:
        _report([result.error.diagnostic(args.file)], args.file)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_dump_ast(args) -> int:
    source = _read(args.file)
    try:
        program = parse_source(source)
    except FarfelError as err:
        _report([err.diagnostic(args.file)], args.file)
        return EXIT_COMPILE
    sys.stdout.write(format_program(program))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        entries = load_manifest(args.manifest)
    except OSError as err:
        raise _IOFailure(Diagnostic("io", 1, 1, f"cannot read {args.manifest}: "
                                                f"{err.strerror or err}", args.manifest))
    except ManifestError as err:
        print(f"{args.manifest}: manifest: {err}", file=sys.stderr)
        return EXIT_USAGE
    failed = 0
    total = 0
    for entry in entries:
        for check in verify_entry(entry):
            total += 1
            failed += not check.ok
            print(check.line())
    print(f"{total - failed}/{total} checks passed")
    return EXIT_OK if failed == 0 else EXIT_VERIFY


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "dump-tape":
            return cmd_run(args, tapes=True)
        if args.command == "dump-ast":
            return cmd_dump_ast(args)
        return cmd_verify(args)
    except _IOFailure as err:
        print(err.diag.render(), file=sys.stderr)
        return EXIT_COMPILE
    except UsageError as err:
        print(f"farfel: error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
