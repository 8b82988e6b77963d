"""Command-line driver: ``knotlang check|compile|run|demo``.

Exit codes: 0 success, 1 type error, 2 parse error, 3 fuel exhausted,
4 stuck, 5 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

from .cconv import closure_convert, convert_context, typecheck_target
from .context import EMPTY, Context
from .errors import ErrorKind, ParseError, TypingError
from .eval import DEFAULT_FUEL, FuelExhausted, Result, Stuck, eval_source, eval_target, show_value, trace
from .sorts import sort_of_source
from .syntax import NAT, Arrow, Ref, parse_source, pretty, pretty_type
from .typecheck import Mode, explain, typecheck_source

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_PARSE = 2
EXIT_FUEL = 3
EXIT_STUCK = 4
EXIT_USAGE = 5

FUEL_ENV = "KNOTLANG_FUEL"


@dataclass
class Verdict:
    command: str
    mode: Optional[Mode]
    exit_code: int
    message: str


class _UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as err:
        raise _UsageError(f"cannot read {path}: {err.strerror}") from None


def _front(path: str, mode: Mode):
    """Parse and check ``path``; returns (term, type) or a failing Verdict."""
    try:
        term = parse_source(_read(path))
    except ParseError as err:
        return None, None, Verdict("check", mode, EXIT_PARSE, err.render(path))
    try:
        ty = typecheck_source(EMPTY, term, mode)
    except TypingError as err:
        return term, None, Verdict("check", mode, EXIT_TYPE, err.render(path))
    return term, ty, None


def cmd_check(path: str, mode: Mode) -> Verdict:
    _, ty, failed = _front(path, mode)
    if failed:
        return failed
    msg = pretty_type(ty)
    if mode is Mode.SORTED:
        msg += f" :: Type {sort_of_source(EMPTY, ty)}"
    return Verdict("check", mode, EXIT_OK, msg)


def cmd_compile(path: str, mode: Mode, out: Optional[str] = None) -> Verdict:
    term, _, failed = _front(path, mode)
    if failed:
        failed.command = "compile"
        return failed
    target = closure_convert(term, mode)
    try:
        typecheck_target(EMPTY, target, mode)
    except TypingError as err:
        return Verdict("compile", mode, EXIT_TYPE, err.render(path))
    text = pretty(target, multiline=True) + "\n"
    if out is None:
        return Verdict("compile", mode, EXIT_OK, text.rstrip("\n"))
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)
    return Verdict("compile", mode, EXIT_OK, f"wrote {out}")


def default_fuel() -> int:
    raw = os.environ.get(FUEL_ENV)
    if raw is None:
        return DEFAULT_FUEL
    try:
        fuel = int(raw)
    except ValueError:
        raise _UsageError(f"{FUEL_ENV} must be an integer, got {raw!r}") from None
    return fuel


def cmd_run(
    path: str, mode: Mode, fuel: Optional[int] = None, target: bool = False, trace_steps: int = 0
) -> Verdict:
    if fuel is None:
        fuel = default_fuel()
    if fuel < 1:
        raise _UsageError("fuel must be at least 1")
    term, _, failed = _front(path, mode)
    if failed:
        failed.command = "run"
        return failed
    if target:
        term = closure_convert(term, mode)
        try:
            typecheck_target(EMPTY, term, mode)
        except TypingError as err:
            return Verdict("run", mode, EXIT_TYPE, err.render(path))
    lines = [r.tsv() for r in trace(term, fuel, trace_steps)] if trace_steps > 0 else []
    outcome = eval_target(term, fuel) if target else eval_source(term, fuel)
    match outcome:
        case Result(value=v, steps=n):
            lines.append(show_value(v))
            code = EXIT_OK
            print(f"({n} steps)", file=sys.stderr)
        case FuelExhausted(steps=n):
            lines.append(f"FUEL EXHAUSTED after {n} steps")
            code = EXIT_FUEL
        case Stuck(description=d, redex=r):
            lines.append(f"STUCK: {d}: {r}")
            code = EXIT_STUCK
    return Verdict("run", mode, code, "\n".join(lines))


# --- demo -------------------------------------------------------------------------


def corpus_text(name: str) -> str:
    return resources.files("knotlang").joinpath("corpus", name).read_text(encoding="utf-8")


# the captured reference of f, at the type `new id` gives it under the sorted rules
F_CONTEXT = Context.of(r=Ref(Arrow(NAT, NAT, 0)))
F_SOURCE = "lam x : Nat . (!r) x"


def _expect_error(term, mode: Mode, kind: ErrorKind, line: int, col: int, check=typecheck_source) -> tuple[bool, str]:
    try:
        ty = check(EMPTY, term, mode)
    except TypingError as err:
        ok = err.kind is kind and err.loc is not None and (err.loc.line, err.loc.col) == (line, col)
        return ok, err.render("knot.src")
    return False, f"accepted at {pretty_type(ty)}"


def cmd_demo(out=None) -> Verdict:
    out = out or sys.stdout
    results: list[bool] = []

    def verdict(title: str, ok: bool, detail: str) -> None:
        results.append(ok)
        print(f"[{'ok' if ok else 'MISMATCH'}] {title}", file=out)
        for line in detail.rstrip("\n").splitlines():
            print(f"    {line}", file=out)

    knot_text = corpus_text("knot.src")
    knot = parse_source(knot_text)
    print("Landin's Knot:\n", file=out)
    for line in knot_text.strip().splitlines():
        if not line.startswith("--"):
            print(f"    {line}", file=out)
    print(file=out)

    try:
        ty = typecheck_source(EMPTY, knot, Mode.UNRESTRICTED)
        outcome = eval_source(knot, DEFAULT_FUEL)
        ok = ty == NAT and isinstance(outcome, FuelExhausted)
        detail = f"type {pretty_type(ty)}; evaluation with fuel {DEFAULT_FUEL}: {type(outcome).__name__}"
    except TypingError as err:
        ok, detail = False, err.render("knot.src")
    verdict("unrestricted: the knot is well typed and diverges", ok, detail)

    ok, detail = _expect_error(knot, Mode.FULL_GROUND, ErrorKind.NonFullGroundCapture, 3, 9)
    verdict("full-ground: f may not capture r : Ref (Nat -> Nat)", ok, detail)

    ok, detail = _expect_error(knot, Mode.SORTED, ErrorKind.SortMismatch, 4, 1)
    verdict("sorted: r := f stores a level-1 closure in a level-0 cell", ok, detail)

    id_target = closure_convert(parse_source(corpus_text("id.src")), Mode.SORTED)
    d = explain(id_target, Mode.SORTED)
    verdict("id converts to a package at Type 0", d.rule == "Pack" and d.sort == 0, d.render())

    f_target = closure_convert(parse_source(F_SOURCE), Mode.SORTED, F_CONTEXT)
    try:
        d = explain(f_target, Mode.SORTED, convert_context(F_CONTEXT, Mode.SORTED))
        witness = d.premises[0]
        d1 = [n for n in witness.walk() if n.rule == "Ref"]
        ok = d.rule == "Pack" and d.sort == 1 and witness.sort == 1 and bool(d1) and d1[0].sort == 1
        detail = d.render()
    except TypingError as err:
        ok, detail = False, str(err)
    verdict("f converts to a package at Type 1; its environment holds Ref (...) :: Type 1", ok, detail)

    knot_target = closure_convert(knot, Mode.SORTED)
    ok, detail = _expect_error(knot_target, Mode.SORTED, ErrorKind.SortMismatch, 4, 1, check=typecheck_target)
    verdict("sorted target: the converted update r := f is rejected", ok, detail)

    passed = sum(results)
    print(f"\n{passed}/{len(results)} expected verdicts", file=out)
    code = EXIT_OK if passed == len(results) else EXIT_TYPE
    return Verdict("demo", Mode.SORTED, code, "")


# --- entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="knotlang", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_ArgumentParser)

    def add_mode(p):
        p.add_argument(
            "--mode", choices=[m.value for m in Mode], default=Mode.SORTED.value, help="typing discipline (default: sorted)"
        )

    p = sub.add_parser("check", help="type check a source program")
    p.add_argument("file")
    add_mode(p)

    p = sub.add_parser("compile", help="closure-convert a program and print the target")
    p.add_argument("file")
    add_mode(p)
    p.add_argument("--out", help="write the target program here instead of stdout")

    p = sub.add_parser("run", help="evaluate a program")
    p.add_argument("file")
    add_mode(p)
    p.add_argument("--fuel", type=int, help=f"step budget (default ${FUEL_ENV} or {DEFAULT_FUEL})")
    p.add_argument("--target", action="store_true", help="run the closure-converted program")
    p.add_argument("--trace", type=int, default=0, metavar="K", help="print the first K evaluation steps")

    sub.add_parser("demo", help="replay the Landin's Knot narrative and verify every verdict")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    mode = Mode(args.mode) if hasattr(args, "mode") else None
    try:
        if args.command == "check":
            v = cmd_check(args.file, mode)
        elif args.command == "compile":
            v = cmd_compile(args.file, mode, args.out)
        elif args.command == "run":
            v = cmd_run(args.file, mode, args.fuel, args.target, args.trace)
        else:
            v = cmd_demo()
    except _UsageError as err:
        print(f"knotlang: error: {err}", file=sys.stderr)
        return EXIT_USAGE
    if v.message:
        stream = sys.stdout if v.exit_code in (EXIT_OK, EXIT_FUEL) else sys.stderr
        print(v.message, file=stream)
    return v.exit_code


if __name__ == "__main__":
    sys.exit(main())
