"""Term and type ASTs with capture-avoiding substitution.

One class hierarchy serves both the erased calculus and the annotated
surface language: an erased term simply has no binder annotations, no
``TyAbs``/``TyApp`` nodes and no zero witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Optional, Union

from .scalar import Scalar

__all__ = [
    "Term", "Var", "Abs", "App", "Zero", "Scale", "Sum", "TyAbs", "TyApp",
    "Type", "UnitType", "TVar", "Arrow", "Forall", "TScale", "TSum",
    "is_unit", "is_basis", "is_erased", "erase", "free_vars", "free_type_vars",
    "type_free_vars", "subst_term", "subst_term_type", "subst_type",
    "subst_type_many", "alpha_eq", "alpha_eq_ty", "fresh", "summands",
    "type_summands", "make_sum", "make_tsum", "term_size", "type_size",
]


# types

@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class Arrow:
    dom: "UnitType"
    cod: "Type"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "UnitType"


@dataclass(frozen=True)
class TScale:
    scalar: Scalar
    body: "Type"


@dataclass(frozen=True)
class TSum:
    left: "Type"
    right: "Type"


UnitType = Union[TVar, Arrow, Forall]
Type = Union[TVar, Arrow, Forall, TScale, TSum]


def is_unit(t: Type) -> bool:
    return isinstance(t, (TVar, Arrow, Forall))


# terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Abs:
    var: str
    ty: Optional[UnitType]
    body: "Term"


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Zero:
    witness: Optional["Term"] = None


@dataclass(frozen=True)
class Scale:
    scalar: Scalar
    body: "Term"


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class TyAbs:
    var: str
    body: "Term"


@dataclass(frozen=True)
class TyApp:
    body: "Term"
    ty: UnitType


Term = Union[Var, Abs, App, Zero, Scale, Sum, TyAbs, TyApp]


def is_basis(t: Term) -> bool:
    """Basis in the erased sense: type abstraction/application is transparent."""
    while isinstance(t, (TyAbs, TyApp)):
        t = t.body
    return isinstance(t, (Var, Abs))


def is_erased(t: Term) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, Abs):
        return t.ty is None and is_erased(t.body)
    if isinstance(t, App):
        return is_erased(t.fun) and is_erased(t.arg)
    if isinstance(t, Zero):
        return t.witness is None
    if isinstance(t, Scale):
        return is_erased(t.body)
    if isinstance(t, Sum):
        return is_erased(t.left) and is_erased(t.right)
    return False


def erase(t: Term) -> Term:
    if isinstance(t, Var):
        return t
    if isinstance(t, Abs):
        return Abs(t.var, None, erase(t.body))
    if isinstance(t, App):
        return App(erase(t.fun), erase(t.arg))
    if isinstance(t, Zero):
        return Zero()
    if isinstance(t, Scale):
        return Scale(t.scalar, erase(t.body))
    if isinstance(t, Sum):
        return Sum(erase(t.left), erase(t.right))
    if isinstance(t, (TyAbs, TyApp)):
        return erase(t.body)
    raise TypeError(f"not a term: {t!r}")


# sums

def summands(t: Term) -> list[Term]:
    """Flatten nested binary sums, left to right."""
    out: list[Term] = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Sum):
            stack.append(s.right)
            stack.append(s.left)
        else:
            out.append(s)
    return out


def make_sum(ts: Iterable[Term]) -> Term:
    ts = list(ts)
    if not ts:
        raise ValueError("empty sum")
    acc = ts[0]
    for s in ts[1:]:
        acc = Sum(acc, s)
    return acc


def type_summands(t: Type) -> list[Type]:
    out: list[Type] = []
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, TSum):
            stack.append(s.right)
            stack.append(s.left)
        else:
            out.append(s)
    return out


def make_tsum(ts: Iterable[Type]) -> Type:
    ts = list(ts)
    if not ts:
        raise ValueError("empty type sum")
    acc = ts[0]
    for s in ts[1:]:
        acc = TSum(acc, s)
    return acc


# sizes

def term_size(t: Term) -> int:
    if isinstance(t, Var):
        return 1
    if isinstance(t, Abs):
        return 1 + term_size(t.body)
    if isinstance(t, App):
        return 1 + term_size(t.fun) + term_size(t.arg)
    if isinstance(t, Zero):
        return 1
    if isinstance(t, (Scale, TyAbs, TyApp)):
        return 1 + term_size(t.body)
    if isinstance(t, Sum):
        return 1 + term_size(t.left) + term_size(t.right)
    raise TypeError(t)


def type_size(t: Type) -> int:
    if isinstance(t, TVar):
        return 1
    if isinstance(t, Arrow):
        return 1 + type_size(t.dom) + type_size(t.cod)
    if isinstance(t, (Forall, TScale)):
        return 1 + type_size(t.body)
    if isinstance(t, TSum):
        return 1 + type_size(t.left) + type_size(t.right)
    raise TypeError(t)


# free variables

def fresh(name: str, avoid: Iterable[str]) -> str:
    avoid = set(avoid)
    cand = name
    while cand in avoid:
        cand += "'"
    return cand


def type_free_vars(t: Type) -> frozenset[str]:
    if isinstance(t, TVar):
        return frozenset((t.name,))
    if isinstance(t, Arrow):
        return type_free_vars(t.dom) | type_free_vars(t.cod)
    if isinstance(t, Forall):
        return type_free_vars(t.body) - {t.var}
    if isinstance(t, TScale):
        return type_free_vars(t.body)
    if isinstance(t, TSum):
        return type_free_vars(t.left) | type_free_vars(t.right)
    raise TypeError(t)


def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Abs):
        return free_vars(t.body) - {t.var}
    if isinstance(t, App):
        return free_vars(t.fun) | free_vars(t.arg)
    if isinstance(t, Zero):
        return free_vars(t.witness) if t.witness is not None else frozenset()
    if isinstance(t, (Scale, TyAbs, TyApp)):
        return free_vars(t.body)
    if isinstance(t, Sum):
        return free_vars(t.left) | free_vars(t.right)
    raise TypeError(t)


def free_type_vars(t: Term) -> frozenset[str]:
    """Type variables occurring free in the annotations of a term."""
    if isinstance(t, Var):
        return frozenset()
    if isinstance(t, Abs):
        own = type_free_vars(t.ty) if t.ty is not None else frozenset()
        return own | free_type_vars(t.body)
    if isinstance(t, App):
        return free_type_vars(t.fun) | free_type_vars(t.arg)
    if isinstance(t, Zero):
        return free_type_vars(t.witness) if t.witness is not None else frozenset()
    if isinstance(t, Scale):
        return free_type_vars(t.body)
    if isinstance(t, Sum):
        return free_type_vars(t.left) | free_type_vars(t.right)
    if isinstance(t, TyAbs):
        return free_type_vars(t.body) - {t.var}
    if isinstance(t, TyApp):
        return free_type_vars(t.body) | type_free_vars(t.ty)
    raise TypeError(t)


def _bound_names(t: Term) -> Iterator[str]:
    if isinstance(t, Abs):
        yield t.var
    elif isinstance(t, TyAbs):
        yield t.var
    for child in _children(t):
        yield from _bound_names(child)


def _children(t: Term) -> tuple[Term, ...]:
    if isinstance(t, Abs):
        return (t.body,)
    if isinstance(t, App):
        return (t.fun, t.arg)
    if isinstance(t, Zero):
        return (t.witness,) if t.witness is not None else ()
    if isinstance(t, (Scale, TyAbs, TyApp)):
        return (t.body,)
    if isinstance(t, Sum):
        return (t.left, t.right)
    return ()


# type substitution

def subst_type(t: Type, var: str, u: UnitType) -> Type:
    """``t[u/var]``, renaming binders that would capture free variables of ``u``."""
    return subst_type_many(t, {var: u})


def subst_type_many(t: Type, sub: Mapping[str, UnitType]) -> Type:
    """Simultaneous capture-avoiding substitution of unit types for type variables."""
    if not sub:
        return t
    if isinstance(t, TVar):
        return sub.get(t.name, t)
    if isinstance(t, Arrow):
        return Arrow(subst_type_many(t.dom, sub), subst_type_many(t.cod, sub))
    if isinstance(t, Forall):
        inner = {k: v for k, v in sub.items() if k != t.var}
        if not inner:
            return t
        rng = frozenset().union(*(type_free_vars(v) for v in inner.values()))
        var, body = t.var, t.body
        if var in rng:
            new = fresh(var, rng | type_free_vars(body) | set(inner))
            body = subst_type_many(body, {var: TVar(new)})
            var = new
        return Forall(var, subst_type_many(body, inner))
    if isinstance(t, TScale):
        return TScale(t.scalar, subst_type_many(t.body, sub))
    if isinstance(t, TSum):
        return TSum(subst_type_many(t.left, sub), subst_type_many(t.right, sub))
    raise TypeError(t)


def subst_term_type(t: Term, sub: Mapping[str, UnitType]) -> Term:
    """Substitute unit types for free type variables in a term's annotations."""
    if not sub:
        return t
    if isinstance(t, Var):
        return t
    if isinstance(t, Abs):
        ty = subst_type_many(t.ty, sub) if t.ty is not None else None
        return Abs(t.var, ty, subst_term_type(t.body, sub))
    if isinstance(t, App):
        return App(subst_term_type(t.fun, sub), subst_term_type(t.arg, sub))
    if isinstance(t, Zero):
        return t if t.witness is None else Zero(subst_term_type(t.witness, sub))
    if isinstance(t, Scale):
        return Scale(t.scalar, subst_term_type(t.body, sub))
    if isinstance(t, Sum):
        return Sum(subst_term_type(t.left, sub), subst_term_type(t.right, sub))
    if isinstance(t, TyApp):
        return TyApp(subst_term_type(t.body, sub), subst_type_many(t.ty, sub))
    if isinstance(t, TyAbs):
        inner = {k: v for k, v in sub.items() if k != t.var}
        if not inner:
            return t
        rng = frozenset().union(*(type_free_vars(v) for v in inner.values()))
        var, body = t.var, t.body
        if var in rng:
            new = fresh(var, rng | free_type_vars(body) | set(inner))
            body = subst_term_type(body, {var: TVar(new)})
            var = new
        return TyAbs(var, subst_term_type(body, inner))
    raise TypeError(t)


# term substitution

def subst_term(t: Term, x: str, b: Term) -> Term:
    """``t[b/x]``; homomorphic through sums, scalars and zero.

    Both term binders and type binders are renamed when they would capture
    free (term or type) variables of ``b``.
    """
    return _subst(t, x, b, free_vars(b), free_type_vars(b))


def _subst(t: Term, x: str, b: Term, fvb: frozenset[str], ftvb: frozenset[str]) -> Term:
    if isinstance(t, Var):
        return b if t.name == x else t
    if isinstance(t, Abs):
        if t.var == x or x not in free_vars(t.body):
            return t
        var, body = t.var, t.body
        if var in fvb:
            new = fresh(var, fvb | free_vars(body) | {x})
            body = _subst(body, var, Var(new), frozenset((new,)), frozenset())
            var = new
        return Abs(var, t.ty, _subst(body, x, b, fvb, ftvb))
    if isinstance(t, App):
        return App(_subst(t.fun, x, b, fvb, ftvb), _subst(t.arg, x, b, fvb, ftvb))
    if isinstance(t, Zero):
        return t if t.witness is None else Zero(_subst(t.witness, x, b, fvb, ftvb))
    if isinstance(t, Scale):
        return Scale(t.scalar, _subst(t.body, x, b, fvb, ftvb))
    if isinstance(t, Sum):
        return Sum(_subst(t.left, x, b, fvb, ftvb), _subst(t.right, x, b, fvb, ftvb))
    if isinstance(t, TyApp):
        return TyApp(_subst(t.body, x, b, fvb, ftvb), t.ty)
    if isinstance(t, TyAbs):
        if x not in free_vars(t.body):
            return t
        var, body = t.var, t.body
        if var in ftvb:
            new = fresh(var, ftvb | free_type_vars(body))
            body = subst_term_type(body, {var: TVar(new)})
            var = new
        return TyAbs(var, _subst(body, x, b, fvb, ftvb))
    raise TypeError(t)


# alpha-equivalence

def alpha_eq(t: Term, r: Term) -> bool:
    """Equality up to renaming of term and type binders (annotations included)."""
    return _aeq(t, r, {}, {}, {}, {}, 0)


def _aeq(t: Term, r: Term, lt: dict, rt: dict, lty: dict, rty: dict, depth: int) -> bool:
    if type(t) is not type(r):
        return False
    if isinstance(t, Var):
        return lt.get(t.name, t.name) == rt.get(r.name, r.name)
    if isinstance(t, Abs):
        if (t.ty is None) != (r.ty is None):
            return False
        if t.ty is not None and not _teq(t.ty, r.ty, lty, rty, depth):
            return False
        key = ("v", depth)
        return _aeq(t.body, r.body, {**lt, t.var: key}, {**rt, r.var: key}, lty, rty, depth + 1)
    if isinstance(t, App):
        return (_aeq(t.fun, r.fun, lt, rt, lty, rty, depth)
                and _aeq(t.arg, r.arg, lt, rt, lty, rty, depth))
    if isinstance(t, Zero):
        if t.witness is None or r.witness is None:
            return t.witness is None and r.witness is None
        return _aeq(t.witness, r.witness, lt, rt, lty, rty, depth)
    if isinstance(t, Scale):
        return t.scalar == r.scalar and _aeq(t.body, r.body, lt, rt, lty, rty, depth)
    if isinstance(t, Sum):
        return (_aeq(t.left, r.left, lt, rt, lty, rty, depth)
                and _aeq(t.right, r.right, lt, rt, lty, rty, depth))
    if isinstance(t, TyAbs):
        key = ("t", depth)
        return _aeq(t.body, r.body, lt, rt, {**lty, t.var: key}, {**rty, r.var: key}, depth + 1)
    if isinstance(t, TyApp):
        return (_teq(t.ty, r.ty, lty, rty, depth)
                and _aeq(t.body, r.body, lt, rt, lty, rty, depth))
    raise TypeError(t)


def alpha_eq_ty(t: Type, r: Type) -> bool:
    """Structural equality up to bound-variable names (no AC, no scalar laws)."""
    return _teq(t, r, {}, {}, 0)


def _teq(t: Type, r: Type, lenv: dict, renv: dict, depth: int) -> bool:
    if type(t) is not type(r):
        return False
    if isinstance(t, TVar):
        return lenv.get(t.name, t.name) == renv.get(r.name, r.name)
    if isinstance(t, Arrow):
        return _teq(t.dom, r.dom, lenv, renv, depth) and _teq(t.cod, r.cod, lenv, renv, depth)
    if isinstance(t, Forall):
        key = ("t", depth)
        return _teq(t.body, r.body, {**lenv, t.var: key}, {**renv, r.var: key}, depth + 1)
    if isinstance(t, TScale):
        return t.scalar == r.scalar and _teq(t.body, r.body, lenv, renv, depth)
    if isinstance(t, TSum):
        return _teq(t.left, r.left, lenv, renv, depth) and _teq(t.right, r.right, lenv, renv, depth)
    raise TypeError(t)
