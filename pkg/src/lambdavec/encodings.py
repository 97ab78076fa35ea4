"""Standard programs: booleans, thunks, the linear conditional, pairs, and
encodings of matrices acting on linear combinations of basis terms."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Mapping, Optional, Sequence

from .checker import TypingError, infer, replay
from .parse import Program, parse_program
from .rewrite import DEFAULT_FUEL, FuelExhausted, alpha_key, normalize_no_F
from .scalar import Scalar, parse_scalar
from .syntax import (
    Abs, App, Arrow, Forall, Scale, Term, TScale, TVar, TyAbs, TyApp,
    Type, UnitType, Var, Zero, free_vars, fresh, make_sum, make_tsum, summands,
    type_free_vars,
)

__all__ = [
    "prelude", "PRELUDE_TEXT", "I_TYPE", "ID", "TRUE", "FALSE", "TT", "FF",
    "thunk", "release", "basis", "basis_type", "encode_map2", "map2_type",
    "apply_map2", "encode_if", "pair", "pair_type", "proj", "MatrixEncoding",
    "encode_matrix", "apply_encoded", "parse_matrix", "read_coefficients",
    "NonNormalizable", "NotABasisCombination", "PreludeError",
]


class NonNormalizable(RuntimeError):
    pass


class NotABasisCombination(ValueError):
    pass


class PreludeError(RuntimeError):
    pass


I_TYPE: UnitType = Forall("X", Arrow(TVar("X"), TVar("X")))
ID: Term = TyAbs("X", Abs("x", TVar("X"), Var("x")))


def basis(n: int, i: int) -> Term:
    """``/\\X1..Xn. \\x1:X1 ... \\xn:Xn. xi`` (``i`` counts from 1)."""
    if not 1 <= i <= n:
        raise ValueError(f"basis index {i} out of range for dimension {n}")
    body: Term = Var(f"x{i}")
    for k in range(n, 0, -1):
        body = Abs(f"x{k}", TVar(f"X{k}"), body)
    for k in range(n, 0, -1):
        body = TyAbs(f"X{k}", body)
    return body


def basis_type(n: int, i: int) -> UnitType:
    ty: Type = TVar(f"X{i}")
    for k in range(n, 0, -1):
        ty = Arrow(TVar(f"X{k}"), ty)
    for k in range(n, 0, -1):
        ty = Forall(f"X{k}", ty)
    return ty


TRUE: Term = basis(2, 1)
FALSE: Term = basis(2, 2)
TT: UnitType = basis_type(2, 1)
FF: UnitType = basis_type(2, 2)


def thunk(t: Term) -> Term:
    """Freeze ``t`` behind an abstraction over an unused variable of type ``I``."""
    return Abs(fresh("f", free_vars(t)), I_TYPE, t)


def release(t: Term) -> Term:
    return App(t, ID)


def _instantiate(t: Term, tys: Sequence[UnitType]) -> Term:
    for ty in tys:
        t = TyApp(t, ty)
    return t


def _combination(coefs: Sequence[Scalar], n: int, tys: Sequence[UnitType] = ()) -> Term:
    return make_sum(Scale(Scalar.of(c), _instantiate(basis(n, i + 1), tys))
                    for i, c in enumerate(coefs))


def _combination_type(coefs: Sequence[Scalar], n: int) -> Type:
    return make_tsum(TScale(Scalar.of(c), basis_type(n, i + 1)) for i, c in enumerate(coefs))


# matrices

@dataclass(frozen=True)
class MatrixEncoding:
    n: int
    entries: tuple[tuple[Scalar, ...], ...]
    term: Term
    type: Type
    thunk_types: tuple[UnitType, ...]


def encode_matrix(n: int, entries: Sequence[Sequence]) -> MatrixEncoding:
    """``/\\X. \\x:Th1->...->Thn->X. (...((x) {col1}) ...) {coln}`` where
    ``colj`` is column ``j`` as a combination of basis terms."""
    if n < 1:
        raise ValueError("dimension must be at least 1")
    rows = tuple(tuple(Scalar.of(e) for e in row) for row in entries)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected a {n}x{n} matrix")
    cols = [[rows[i][j] for i in range(n)] for j in range(n)]
    ths = tuple(Arrow(I_TYPE, _combination_type(col, n)) for col in cols)
    dom: Type = TVar("X")
    for th in reversed(ths):
        dom = Arrow(th, dom)
    body: Term = Var("x")
    for col in cols:
        body = App(body, thunk(_combination(col, n)))
    term = TyAbs("X", Abs("x", dom, body))
    ty = Forall("X", Arrow(dom, TVar("X")))
    return MatrixEncoding(n, rows, term, ty, ths)


def _apply_term(m: MatrixEncoding, v: Sequence) -> Term:
    arg = _combination([Scalar.of(x) for x in v], m.n, m.thunk_types)
    return release(App(m.term, arg))


def read_coefficients(t: Term, n: int) -> list[Scalar]:
    """Coefficients of ``basis(n, i)`` in a linear combination of basis terms."""
    keys = {alpha_key(basis(n, i + 1)): i for i in range(n)}
    out = [Scalar.of(0)] * n
    for s in summands(t):
        coef = Scalar.of(1)
        while isinstance(s, Scale):
            coef = coef * s.scalar
            s = s.body
        if isinstance(s, Zero):
            continue
        k = alpha_key(s)
        if k not in keys:
            raise NotABasisCombination(f"summand is not a basis term of dimension {n}")
        out[keys[k]] = out[keys[k]] + coef
    return out


def apply_encoded(m: MatrixEncoding, v: Sequence, fuel: int = DEFAULT_FUEL,
                  typecheck: bool = True) -> list[Scalar]:
    """Apply the encoded matrix to the vector ``v`` by reduction and read off the result."""
    if len(v) != m.n:
        raise ValueError(f"expected a vector of length {m.n}")
    term = _apply_term(m, v)
    if typecheck:
        infer({}, term)
    try:
        final = normalize_no_F(term, fuel).final
    except FuelExhausted as exc:
        raise NonNormalizable(str(exc)) from exc
    return read_coefficients(final, m.n)


def encode_map2(a, b, c, d) -> Term:
    """The map sending true to ``a.true + b.false`` and false to ``c.true + d.false``."""
    return encode_matrix(2, [[a, c], [b, d]]).term


def map2_type(a, b, c, d) -> UnitType:
    return encode_matrix(2, [[a, c], [b, d]]).type


def apply_map2(a, b, c, d, alpha, beta) -> Term:
    """Released application of the 2x2 map to ``alpha.true + beta.false``."""
    return _apply_term(encode_matrix(2, [[a, c], [b, d]]), [alpha, beta])


def parse_matrix(text: str) -> tuple[int, list[list[Scalar]]]:
    """First line ``n``, then ``n`` rows of ``n`` whitespace-separated scalars."""
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise ValueError("empty matrix file")
    n = int(lines[0])
    rows = [[parse_scalar(tok) for tok in ln.split()] for ln in lines[1:]]
    if len(rows) != n or any(len(r) != n for r in rows):
        raise ValueError(f"expected {n} rows of {n} entries")
    return n, rows


# conditional and pairs

def encode_if(r: Term, s: Term, t: Term, ctx: Optional[Mapping[str, UnitType]] = None) -> Term:
    """``release(((r[Ths][Tht]) {s}) {t})`` with the thunk types inferred from ``s`` and ``t``."""
    ctx = dict(ctx or {})
    th_s = Arrow(I_TYPE, infer(ctx, s).type)
    th_t = Arrow(I_TYPE, infer(ctx, t).type)
    return release(App(App(TyApp(TyApp(r, th_s), th_t), thunk(s)), thunk(t)))


def pair(b: Term, c: Term, u: UnitType, v: UnitType) -> Term:
    """``/\\X. \\x:U->V->X. ((x) b) c``."""
    x = "X"
    while x in _tvars(u) | _tvars(v):
        x += "'"
    k = fresh("k", free_vars(b) | free_vars(c))
    return TyAbs(x, Abs(k, Arrow(u, Arrow(v, TVar(x))), App(App(Var(k), b), c)))


def pair_type(u: UnitType, v: UnitType) -> UnitType:
    x = "X"
    while x in _tvars(u) | _tvars(v):
        x += "'"
    return Forall(x, Arrow(Arrow(u, Arrow(v, TVar(x))), TVar(x)))


def proj(i: int) -> Term:
    """Projection ``i`` (1 or 2), polymorphic in both component types."""
    if i not in (1, 2):
        raise ValueError("projection index must be 1 or 2")
    a, b = TVar("A"), TVar("B")
    pty = Forall("X", Arrow(Arrow(a, Arrow(b, TVar("X"))), TVar("X")))
    sel = Abs("y", a, Abs("z", b, Var("y" if i == 1 else "z")))
    return TyAbs("A", TyAbs("B", Abs("p", pty, App(TyApp(Var("p"), a if i == 1 else b), sel))))


def _tvars(u: Type) -> set[str]:
    return set(type_free_vars(u))


# prelude

PRELUDE_TEXT = resources.files("lambdavec").joinpath("prelude.lvec").read_text(encoding="utf-8")


@lru_cache(maxsize=1)
def _prelude() -> Program:
    prog = parse_program(PRELUDE_TEXT)
    for name, term in prog.defs.items():
        try:
            d = infer(prog.assumptions, term)
        except TypingError as exc:
            raise PreludeError(f"prelude definition {name} does not type: {exc}") from exc
        if not replay(d):
            raise PreludeError(f"prelude derivation for {name} does not replay")
    return prog


def prelude() -> Program:
    """A fresh copy of the checked prelude."""
    return _prelude().copy()
