"""Command-line front end: check, reduce, audit and an interactive loop."""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence, TextIO

from .audit import AUDITS, run_audit
from .checker import TypingError, infer, replay
from .encodings import prelude
from .parse import ParseError, Program, parse_program, parse_term, show_term, show_type
from .rewrite import NO_F, RULES, STRATEGIES, FuelExhausted, Trace, normalize
from .syntax import Term, erase

EXIT_OK, EXIT_ERROR, EXIT_FUEL, EXIT_COUNTEREXAMPLE = 0, 1, 2, 3


def default_fuel() -> int:
    return int(os.environ.get("LAMBDAVEC_FUEL", "100000"))


class Session:
    """A program (prelude plus loaded files) and how to print its terms and types."""

    def __init__(self, with_prelude: bool = True, annotated: bool = False):
        self.program = prelude() if with_prelude else Program()
        self.annotated = annotated

    def load_text(self, text: str) -> list[str]:
        before = set(self.program.defs)
        self.program = parse_program(text, self.program)
        return [n for n in self.program.defs if n not in before]

    def load(self, path: str) -> list[str]:
        with open(path, encoding="utf-8") as fh:
            return self.load_text(fh.read())

    def term(self, name_or_expr: str) -> Term:
        if name_or_expr in self.program.defs:
            return self.program.defs[name_or_expr]
        return parse_term(name_or_expr, self.program)

    def show(self, t: Term) -> str:
        return show_term(t if self.annotated else erase(t), self.program.defs)

    def show_type(self, ty) -> str:
        return show_type(ty, names=self.program.aliases)

    @property
    def ctx(self) -> dict:
        return dict(self.program.assumptions)


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _parse_error(path: str, exc: ParseError) -> int:
    _err(f"{path}:{exc}")
    return EXIT_ERROR


# check

def cmd_check(args: argparse.Namespace) -> int:
    s = Session(not args.no_prelude)
    try:
        names = s.load(args.file)
    except ParseError as exc:
        return _parse_error(args.file, exc)
    names = args.names or names
    status, out = EXIT_OK, []
    for name in names:
        try:
            d = infer(s.ctx, s.term(name))
        except (TypingError, ParseError) as exc:
            _err(f"{name}: {exc}")
            status = EXIT_ERROR
            continue
        ok = replay(d)
        if not ok:
            _err(f"{name}: derivation does not replay: {ok.message}")
            status = EXIT_ERROR
        if args.json:
            out.append({"name": name, "type": s.show_type(d.type), "replay": bool(ok),
                        "derivation": d.to_dict(show_term, show_type) if args.derivation else None})
            continue
        print(f"{name} : {s.show_type(d.type)}")
        if args.derivation:
            print(d.pretty(show_term, show_type, 1))
    if args.json:
        print(json.dumps(out, indent=2))
    return status


# reduce

def _print_trace(s: Session, trace: Trace, as_json: bool) -> None:
    if as_json:
        print(trace.dump(s.show))
    else:
        print(trace.text(s.show))


def cmd_reduce(args: argparse.Namespace) -> int:
    s = Session(not args.no_prelude, args.annotated)
    try:
        s.load(args.file)
        t = s.term(args.name)
    except ParseError as exc:
        return _parse_error(args.file, exc)
    if not args.untyped:
        try:
            infer(s.ctx, t)
        except TypingError as exc:
            _err(f"{args.name} does not type ({exc}); pass --untyped to reduce anyway")
            return EXIT_ERROR
    rules = NO_F if args.no_f else frozenset(RULES)
    fuel = args.fuel if args.fuel is not None else default_fuel()
    try:
        trace = normalize(t, fuel, args.strategy, s.ctx, rules)
    except FuelExhausted as exc:
        if args.trace:
            _print_trace(s, exc.trace, args.json)
        _err(f"fuel exhausted after {len(exc.trace.steps)} steps")
        return EXIT_FUEL
    if args.trace or args.json:
        _print_trace(s, trace, args.json)
    else:
        print(s.show(trace.final))
    return EXIT_OK


# audit

def cmd_audit(args: argparse.Namespace) -> int:
    fuel = args.fuel if args.fuel is not None else default_fuel()
    report = run_audit(args.kind, args.samples, args.seed, fuel)
    print(report.dump() if args.json else report.text())
    return EXIT_OK if report.ok else EXIT_COUNTEREXAMPLE


# interactive loop

REPL_HELP = """\
  EXPR              reduce and print the normal form with its type
  :t EXPR           print the type
  :r EXPR           reduce without printing the type
  :trace EXPR       print every reduction step
  :let NAME = EXPR  add a definition (also: let/type/assume statements)
  :load FILE        load a file
  :q                quit"""


def repl(session: Session, inp: TextIO, out: TextIO, fuel: int, interactive: bool) -> int:
    def say(msg: str) -> None:
        print(msg, file=out)

    while True:
        if interactive:
            out.write("lvec> ")
            out.flush()
        line = inp.readline()
        if not line:
            return EXIT_OK
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            if line in (":q", ":quit"):
                return EXIT_OK
            if line in (":h", ":help"):
                say(REPL_HELP)
            elif line.startswith(":load "):
                names = session.load(line[6:].strip())
                say(f"loaded {', '.join(names) or 'no definitions'}")
            elif line.startswith(":let "):
                session.load_text("let " + line[5:].rstrip(";") + ";")
            elif line.split(None, 1)[0] in ("let", "type", "assume"):
                session.load_text(line if line.endswith(";") else line + ";")
            elif line.startswith(":t "):
                d = infer(session.ctx, session.term(line[3:].strip()))
                say(session.show_type(d.type))
            elif line.startswith(":trace "):
                trace = normalize(session.term(line[7:].strip()), fuel, ctx=session.ctx)
                say(trace.text(session.show))
            elif line.startswith(":r "):
                say(session.show(normalize(session.term(line[3:].strip()), fuel, ctx=session.ctx).final))
            elif line.startswith(":"):
                say(f"unknown command {line.split()[0]}; try :help")
            else:
                t = session.term(line)
                ty = session.show_type(infer(session.ctx, t).type)
                say(f"{session.show(normalize(t, fuel, ctx=session.ctx).final)} : {ty}")
        except (ParseError, TypingError, OSError, ValueError) as exc:
            say(f"error: {exc}")
        except FuelExhausted as exc:
            say(f"error: fuel exhausted after {len(exc.trace.steps)} steps")


def cmd_repl(args: argparse.Namespace) -> int:
    s = Session(not args.no_prelude)
    if args.load:
        try:
            s.load(args.load)
        except ParseError as exc:
            return _parse_error(args.load, exc)
    fuel = args.fuel if args.fuel is not None else default_fuel()
    return repl(s, sys.stdin, sys.stdout, fuel, sys.stdin.isatty())


# entry point

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lambdavec", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--no-prelude", action="store_true", help="do not load the standard definitions")

    c = sub.add_parser("check", help="type every definition of a file")
    c.add_argument("file")
    c.add_argument("names", nargs="*", help="only these definitions")
    c.add_argument("--derivation", action="store_true", help="print the typing derivations")
    c.add_argument("--json", action="store_true")
    common(c)
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("reduce", help="normalize a definition or an expression")
    r.add_argument("file")
    r.add_argument("name", help="definition name or term")
    r.add_argument("--no-f", action="store_true", help="disable the factorisation rules F1-F3")
    r.add_argument("--fuel", type=int, default=None, help="step limit (default $LAMBDAVEC_FUEL or 100000)")
    r.add_argument("--trace", action="store_true", help="print every step")
    r.add_argument("--json", action="store_true", help="structured trace")
    r.add_argument("--strategy", choices=STRATEGIES, default="innermost")
    r.add_argument("--untyped", action="store_true", help="reduce even if the term does not type")
    r.add_argument("--annotated", action="store_true", help="print type annotations in terms")
    common(r)
    r.set_defaults(func=cmd_reduce)

    a = sub.add_parser("audit", help="run a metatheory audit")
    a.add_argument("kind", choices=sorted(AUDITS))
    a.add_argument("--samples", type=int, default=200)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--fuel", type=int, default=None)
    a.add_argument("--json", action="store_true")
    a.set_defaults(func=cmd_audit)

    i = sub.add_parser("repl", help="interactive loop")
    i.add_argument("--load", default=None)
    i.add_argument("--fuel", type=int, default=None)
    common(i)
    i.set_defaults(func=cmd_repl)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OSError as exc:
        _err(str(exc))
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
