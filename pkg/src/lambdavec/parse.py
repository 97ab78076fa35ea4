"""Concrete syntax: tokenizer, parser and printer for terms, types and files.

Grammar summary (ASCII spellings)::

    term   ::= scaled (('+' | '-') scaled)*
    scaled ::= scalar '.' scaled | '-' scaled | app
    app    ::= atom atom*                  left-associative juxtaposition
    atom   ::= primary ('[' utype ']')*    type application
    primary::= var | '(' term ')' | '0' ['<' term '>']
             | '\\' x [':' utype] '.' term | '/\\' X '.' term
    type   ::= tscaled (('+' | '-') tscaled)*
    tscaled::= scalar '.' tscaled | utype
    utype  ::= prim ['->' type] ;  prim ::= X | '!' X '.' utype | '(' type ')'

Files hold ``let name = term ;``, ``type Name = type ;`` and
``assume x : utype ;`` statements.  ``#`` starts a line comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Optional

from .scalar import Scalar, ScalarSyntaxError, _ScalarParser
from .syntax import (
    Abs, App, Arrow, Forall, Scale, Sum, Term, TScale, TSum, TVar, TyAbs, TyApp,
    Type, UnitType, Var, Zero, alpha_eq, alpha_eq_ty, erase, free_vars, is_unit, subst_term,
    summands, type_summands,
)

__all__ = [
    "ParseError", "Program", "tokenize", "parse_term", "parse_type",
    "parse_program", "show_term", "show_type", "show_scalar",
]

_SYMBOLS = ("/\\", "->", "\\", ".", ":", "(", ")", "[", "]", "<", ">",
            "+", "-", "*", "/", "!", ";", "=", ",")
_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>#[^\n]*)"
    r"|(?P<num>[0-9]+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*'*)"
    r"|(?P<sym>" + "|".join(re.escape(s) for s in _SYMBOLS) + ")"
)
_KEYWORDS = frozenset(("let", "type", "assume"))


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.message = message
        self.line = line
        self.col = col


Token = tuple[str, str, int, int, int]


def tokenize(text: str) -> Iterator[Token]:
    """Yield ``(kind, text, pos, line, col)``; the stream ends with an ``eof`` token."""
    pos, line, start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            yield (kind, m.group(), pos, line, pos - start + 1)
        pos = m.end()
    yield ("eof", "", pos, line, pos - start + 1)


@dataclass
class Program:
    """Definitions, type aliases and assumptions of a source file (in order)."""

    defs: dict[str, Term] = field(default_factory=dict)
    aliases: dict[str, Type] = field(default_factory=dict)
    assumptions: dict[str, UnitType] = field(default_factory=dict)
    lines: dict[str, tuple[int, int]] = field(default_factory=dict)

    def copy(self) -> Program:
        return Program(dict(self.defs), dict(self.aliases), dict(self.assumptions), dict(self.lines))


class _Parser:
    def __init__(self, text: str, program: Optional[Program] = None):
        self.toks = list(tokenize(text))
        self.i = 0
        self.prog = program if program is not None else Program()

    # token helpers

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def take(self) -> Token:
        tok = self.toks[self.i]
        if tok[0] != "eof":
            self.i += 1
        return tok

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok[3], tok[4])

    def expect(self, text: str) -> Token:
        tok = self.take()
        if tok[1] != text or tok[0] == "eof":
            raise self.error(f"expected {text!r}, found {tok[1] or 'end of input'!r}", tok)
        return tok

    def ident(self) -> str:
        tok = self.take()
        if tok[0] != "ident":
            raise self.error(f"expected identifier, found {tok[1] or 'end of input'!r}", tok)
        return tok[1]

    def try_scalar_dot(self) -> Optional[Scalar]:
        """Parse ``scalar '.'`` if present, otherwise leave the position untouched.
        Only products are read here: a sum of scalars must be parenthesized."""
        kind, text = self.peek()[:2]
        if not (kind in ("num", "ident") or text in ("(", "-")):
            return None
        if kind == "ident" and text not in ("i", "sqrt2"):
            return None
        sp = _ScalarParser([t[:3] for t in self.toks], self.i)
        try:
            value = sp.term()
        except (ScalarSyntaxError, IndexError, ValueError):
            return None
        if self.toks[sp.i][1] != ".":
            return None
        self.i = sp.i + 1
        return value

    # types

    def type_(self) -> Type:
        acc = self.tscaled()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "sym":
            op = self.take()[1]
            nxt = self.tscaled()
            acc = TSum(acc, nxt if op == "+" else TScale(Scalar.of(-1), nxt))
        return acc

    def tscaled(self) -> Type:
        alpha = self.try_scalar_dot()
        if alpha is not None:
            return TScale(alpha, self.tscaled())
        return self.utype_or_paren()

    def utype(self) -> UnitType:
        tok = self.peek()
        ty = self.utype_or_paren()
        if not is_unit(ty):
            raise self.error("expected a unit type", tok)
        return ty

    def utype_or_paren(self) -> Type:
        tok = self.peek()
        head = self.tprim()
        if self.peek()[1] == "->":
            if not is_unit(head):
                raise self.error("arrow domain must be a unit type", tok)
            self.take()
            return Arrow(head, self.type_())
        return head

    def tprim(self) -> Type:
        tok = self.take()
        if tok[1] == "!":
            var = self.ident()
            self.expect(".")
            return Forall(var, self.utype())
        if tok[1] == "(":
            ty = self.type_()
            self.expect(")")
            return ty
        if tok[0] == "ident":
            return self.prog.aliases.get(tok[1], TVar(tok[1]))
        raise self.error(f"unexpected {tok[1] or 'end of input'!r} in type", tok)

    # terms

    def term(self) -> Term:
        acc = self.scaled()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "sym":
            op = self.take()[1]
            nxt = self.scaled()
            acc = Sum(acc, nxt if op == "+" else Scale(Scalar.of(-1), nxt))
        return acc

    def scaled(self) -> Term:
        alpha = self.try_scalar_dot()
        if alpha is not None:
            return Scale(alpha, self.scaled())
        if self.peek()[1] == "-":
            self.take()
            return Scale(Scalar.of(-1), self.scaled())
        return self.app()

    def starts_atom(self) -> bool:
        kind, text = self.peek()[:2]
        if kind == "ident":
            return text not in _KEYWORDS
        if kind == "num":
            return text == "0" and self.peek(1)[1] != "."
        return text in ("(", "\\", "/\\")

    def app(self) -> Term:
        if not self.starts_atom():
            tok = self.peek()
            raise self.error(f"unexpected {tok[1] or 'end of input'!r} in term", tok)
        acc = self.atom()
        while self.starts_atom():
            acc = App(acc, self.atom())
        return acc

    def atom(self) -> Term:
        t = self.primary()
        while self.peek()[1] == "[":
            self.take()
            ty = self.utype()
            self.expect("]")
            t = TyApp(t, ty)
        return t

    def primary(self) -> Term:
        tok = self.take()
        kind, text = tok[:2]
        if kind == "ident":
            return Var(text)
        if kind == "num" and text == "0":
            if self.peek()[1] == "<":
                self.take()
                w = self.term()
                self.expect(">")
                return Zero(w)
            return Zero()
        if text == "(":
            t = self.term()
            self.expect(")")
            return t
        if text == "\\":
            var = self.ident()
            ty = None
            if self.peek()[1] == ":":
                self.take()
                ty = self.utype()
            self.expect(".")
            return Abs(var, ty, self.term())
        if text == "/\\":
            var = self.ident()
            self.expect(".")
            return TyAbs(var, self.term())
        raise self.error(f"unexpected {text or 'end of input'!r} in term", tok)

    def end(self) -> None:
        tok = self.peek()
        if tok[0] != "eof":
            raise self.error(f"unexpected {tok[1]!r} after end", tok)

    # files

    def statement(self) -> None:
        tok = self.take()
        if tok[1] == "let":
            name = self.ident()
            self.expect("=")
            body = self.inline(self.term())
            self.expect(";")
            self.prog.defs[name] = body
            self.prog.lines[name] = (tok[3], tok[4])
        elif tok[1] == "type":
            name = self.ident()
            self.expect("=")
            ty = self.type_()
            self.expect(";")
            self.prog.aliases[name] = ty
        elif tok[1] == "assume":
            name = self.ident()
            self.expect(":")
            ty = self.utype()
            self.expect(";")
            self.prog.assumptions[name] = ty
        else:
            raise self.error("expected 'let', 'type' or 'assume'", tok)

    def inline(self, t: Term) -> Term:
        """Replace free occurrences of defined names by their definitions."""
        for name in [n for n in free_vars(t) if n in self.prog.defs]:
            t = subst_term(t, name, self.prog.defs[name])
        return t


def parse_term(text: str, program: Optional[Program] = None) -> Term:
    p = _Parser(text, program)
    t = p.inline(p.term())
    p.end()
    return t


def parse_type(text: str, program: Optional[Program] = None) -> Type:
    p = _Parser(text, program)
    ty = p.type_()
    p.end()
    return ty


def parse_program(text: str, program: Optional[Program] = None) -> Program:
    """Parse a file; statements extend ``program`` (a copy) when given."""
    p = _Parser(text, program.copy() if program is not None else None)
    while p.peek()[0] != "eof":
        p.statement()
    return p.prog


# printing

def show_scalar(alpha: Scalar) -> str:
    s = str(alpha)
    return f"({s})" if alpha.is_compound() else s


def show_type(t: Type, tail: bool = True, names: Optional[Mapping[str, Type]] = None) -> str:
    """Print a type; arrows and quantifiers are parenthesized unless in tail position.
    Unit subtypes alpha-equal to an entry of ``names`` are printed as that name."""
    if names and not isinstance(t, (TVar, TScale, TSum)):
        for name, u in names.items():
            if alpha_eq_ty(t, u):
                return name
    if isinstance(t, TVar):
        return t.name
    if isinstance(t, Arrow):
        dom = show_type(t.dom, False, names)
        cod = show_type(t.cod, True, names)
        if not (isinstance(t.cod, TVar) or cod in (names or {})):
            cod = f"({cod})"
        s = f"{dom}->{cod}"
        return s if tail else f"({s})"
    if isinstance(t, Forall):
        s = f"!{t.var}.{show_type(t.body, True, names)}"
        return s if tail else f"({s})"
    if isinstance(t, TScale):
        if isinstance(t.body, TSum):
            body = f"({show_type(t.body, True, names)})"
        else:
            body = show_type(t.body, tail, names)
        return f"{show_scalar(t.scalar)} . {body}"
    if isinstance(t, TSum):
        parts = type_summands(t)
        return " + ".join(show_type(s, (k == len(parts) - 1) and tail, names)
                          for k, s in enumerate(parts))
    raise TypeError(t)


def show_term(t: Term, names: Optional[Mapping[str, Term]] = None, tail: bool = True) -> str:
    """Print a term.  Subterms equal (after erasure, up to alpha) to an entry
    of ``names`` are printed as that name."""
    folded = _fold_table(names) if names else ()
    return _show(t, folded, tail)


def _fold_table(names: Mapping[str, Term]) -> tuple[tuple[str, Term], ...]:
    return tuple((n, erase(d)) for n, d in names.items())


def _show(t: Term, folded: tuple, tail: bool) -> str:
    if folded and not isinstance(t, (Sum, Scale, Zero, Var)):
        e = erase(t)
        for name, d in folded:
            if alpha_eq(e, d):
                return name
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Abs):
        ann = f":{show_type(t.ty)}" if t.ty is not None else ""
        s = f"\\{t.var}{ann}. {_show(t.body, folded, True)}"
        return s if tail else f"({s})"
    if isinstance(t, TyAbs):
        s = f"/\\{t.var}. {_show(t.body, folded, True)}"
        return s if tail else f"({s})"
    if isinstance(t, App):
        return f"({_show(t.fun, folded, True)}) {_show_arg(t.arg, folded)}"
    if isinstance(t, TyApp):
        return f"{_show_arg(t.body, folded)}[{show_type(t.ty)}]"
    if isinstance(t, Zero):
        return "0" if t.witness is None else f"0<{_show(t.witness, folded, True)}>"
    if isinstance(t, Scale):
        body = t.body
        inner = f"({_show(body, folded, True)})" if isinstance(body, Sum) else _show(body, folded, tail)
        return f"{show_scalar(t.scalar)} . {inner}"
    if isinstance(t, Sum):
        parts = summands(t)
        return " + ".join(_show(s, folded, tail and k == len(parts) - 1)
                          for k, s in enumerate(parts))
    raise TypeError(t)


def _show_arg(t: Term, folded: tuple) -> str:
    s = _show(t, folded, True)
    if isinstance(t, (Var, TyApp)) or (isinstance(t, Zero)) or s.isidentifier() or _is_name(s):
        return s
    return f"({s})"


def _is_name(s: str) -> bool:
    return re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*'*", s) is not None
