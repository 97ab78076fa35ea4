"""Syntax-directed type checking of annotated terms, producing derivation trees."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

from .scalar import Scalar
from .syntax import (
    Abs, App, Arrow, Forall, Scale, Sum, Term, TScale, TSum, TVar, TyAbs, TyApp,
    Type, UnitType, Var, Zero, alpha_eq_ty, free_type_vars, fresh, make_tsum,
    subst_term_type, subst_type, subst_type_many, type_free_vars,
)
from .typesys import (
    canon_pairs, canon_type, embed, equiv, equiv_unit, match_unit, prec_chain,
)

__all__ = [
    "Context", "Derivation", "TypingError", "UnboundVariable", "NotAnArrow",
    "DomainMismatch", "ForallExpected", "EscapingTypeVar",
    "HeterogeneousFunctionSummands", "MissingAnnotation", "MissingWitness",
    "TypeMismatch", "infer", "check", "replay", "ReplayResult", "context_ftv",
    "map_units",
]

Context = dict[str, UnitType]


class TypingError(Exception):
    def __init__(self, message: str, term: Optional[Term] = None):
        super().__init__(message)
        self.term = term


class UnboundVariable(TypingError):
    pass


class NotAnArrow(TypingError):
    pass


class DomainMismatch(TypingError):
    def __init__(self, message: str, term: Term, index: int, offending: UnitType):
        super().__init__(message, term)
        self.index = index
        self.offending = offending


class ForallExpected(TypingError):
    pass


class EscapingTypeVar(TypingError):
    pass


class HeterogeneousFunctionSummands(TypingError):
    pass


class MissingAnnotation(TypingError):
    pass


class MissingWitness(TypingError):
    pass


class TypeMismatch(TypingError):
    def __init__(self, message: str, term: Term, inferred: Type, expected: Type):
        super().__init__(message, term)
        self.inferred = inferred
        self.expected = expected


@dataclass(frozen=True, eq=False)
class Derivation:
    """One rule application: ``ctx |- term : type`` from ``premises``."""

    rule: str
    ctx: Mapping[str, UnitType]
    term: Term
    type: Type
    premises: tuple["Derivation", ...] = ()
    payload: dict = field(default_factory=dict)

    def nodes(self):
        yield self
        for p in self.premises:
            yield from p.nodes()

    def size(self) -> int:
        return sum(1 for _ in self.nodes())

    def pretty(self, show_term: Callable, show_type: Callable, indent: int = 0) -> str:
        ctx = ", ".join(f"{x}:{show_type(u)}" for x, u in self.ctx.items())
        line = f"{'  ' * indent}[{self.rule}] {ctx} |- {show_term(self.term)} : {show_type(self.type)}"
        return "\n".join([line] + [p.pretty(show_term, show_type, indent + 1) for p in self.premises])

    def to_dict(self, show_term: Callable, show_type: Callable) -> dict:
        return {
            "rule": self.rule,
            "context": {x: show_type(u) for x, u in self.ctx.items()},
            "term": show_term(self.term),
            "type": show_type(self.type),
            "premises": [p.to_dict(show_term, show_type) for p in self.premises],
        }


def context_ftv(ctx: Mapping[str, UnitType]) -> frozenset[str]:
    out: frozenset[str] = frozenset()
    for u in ctx.values():
        out |= type_free_vars(u)
    return out


def map_units(t: Type, f: Callable[[UnitType], UnitType]) -> Type:
    """Apply ``f`` to every unit summand, keeping sums and scalars in place."""
    if isinstance(t, TScale):
        return TScale(t.scalar, map_units(t.body, f))
    if isinstance(t, TSum):
        return TSum(map_units(t.left, f), map_units(t.right, f))
    return f(t)


def _raw_units(t: Type) -> list[UnitType]:
    if isinstance(t, TScale):
        return _raw_units(t.body)
    if isinstance(t, TSum):
        return _raw_units(t.left) + _raw_units(t.right)
    return [t]


def _canonical(d: Derivation) -> Derivation:
    """Close ``d`` with an equivalence step to canonical form when it differs."""
    c = canon_type(d.type)
    if alpha_eq_ty(c, d.type):
        return d
    return Derivation("equiv", d.ctx, d.term, c, (d,))


def _show(t) -> str:
    from .parse import show_term, show_type

    if isinstance(t, (TVar, Arrow, Forall, TScale, TSum)):
        return show_type(t)
    return show_term(t)


# inference

def infer(ctx: Mapping[str, UnitType], t: Term) -> Derivation:
    """Derive ``ctx |- t : T`` with ``T`` in canonical form."""
    ctx = dict(ctx)
    if isinstance(t, Var):
        if t.name not in ctx:
            raise UnboundVariable(f"unbound variable {t.name}", t)
        return _canonical(Derivation("ax", ctx, t, ctx[t.name]))
    if isinstance(t, Abs):
        if t.ty is None:
            raise MissingAnnotation(f"binder {t.var} needs a type annotation", t)
        inner = {**ctx, t.var: t.ty}
        d = infer(inner, t.body)
        return _canonical(Derivation("->I", ctx, t, Arrow(t.ty, d.type), (d,)))
    if isinstance(t, Zero):
        if t.witness is None:
            raise MissingWitness("zero needs a witness term: write 0<t>", t)
        d = infer(ctx, t.witness)
        return _canonical(Derivation("0I", ctx, t, TScale(Scalar.of(0), d.type), (d,)))
    if isinstance(t, Scale):
        d = infer(ctx, t.body)
        return _canonical(Derivation("alphaI", ctx, t, TScale(t.scalar, d.type), (d,)))
    if isinstance(t, Sum):
        dl, dr = infer(ctx, t.left), infer(ctx, t.right)
        return _canonical(Derivation("+I", ctx, t, TSum(dl.type, dr.type), (dl, dr)))
    if isinstance(t, TyAbs):
        # the binder is renamed away from the context, as alpha-equivalence allows
        x, body = _rename_tyabs(t, context_ftv(ctx))
        d = infer(ctx, body)
        ty = map_units(d.type, lambda u: Forall(x, u))
        return _canonical(Derivation("forallI", ctx, t, ty, (d,), {"var": x}))
    if isinstance(t, TyApp):
        d = infer(ctx, t.body)
        for u in _raw_units(d.type):
            if not isinstance(u, Forall):
                raise ForallExpected(f"type application to a term of type {_show(d.type)}", t)
        ty = map_units(d.type, lambda u: subst_type(u.body, u.var, t.ty))
        return _canonical(Derivation("forallE", ctx, t, ty, (d,), {"type": t.ty}))
    if isinstance(t, App):
        return _infer_app(ctx, t)
    raise TypeError(f"not a term: {t!r}")


def _rename_tyabs(t: TyAbs, avoid: frozenset[str]) -> tuple[str, Term]:
    if t.var not in avoid:
        return t.var, t.body
    x = fresh(t.var, avoid | free_type_vars(t.body))
    return x, subst_term_type(t.body, {t.var: TVar(x)})


def _strip(u: UnitType) -> tuple[list[str], UnitType]:
    xs = []
    while isinstance(u, Forall):
        xs.append(u.var)
        u = u.body
    return xs, u


def _infer_app(ctx: Context, t: App) -> Derivation:
    df, da = infer(ctx, t.fun), infer(ctx, t.arg)
    fpairs = canon_pairs(df.type)
    apairs = canon_pairs(da.type)
    stripped = [_strip(u) for _, u in fpairs]
    for xs, body in stripped:
        if not isinstance(body, Arrow):
            raise NotAnArrow(f"cannot apply a term of type {_show(df.type)}", t)
    k = len(stripped[0][0])
    if any(len(xs) != k for xs, _ in stripped):
        raise HeterogeneousFunctionSummands(
            f"function summands have different quantifier prefixes in {_show(df.type)}", t)
    avoid = set(context_ftv(ctx)) | type_free_vars(df.type) | type_free_vars(da.type)
    prefix: list[str] = []
    for x in stripped[0][0]:
        z = fresh(x, avoid)
        avoid.add(z)
        prefix.append(z)
    domain: Optional[UnitType] = None
    cods: list[tuple[Scalar, Type]] = []
    for (c, _), (xs, body) in zip(fpairs, stripped):
        ren = {x: TVar(z) for x, z in zip(xs, prefix)}
        arrow = subst_type_many(body, ren)
        if domain is None:
            domain = arrow.dom
        elif not equiv_unit(domain, arrow.dom):
            raise HeterogeneousFunctionSummands(
                f"function summands disagree on the domain: {_show(domain)} vs {_show(arrow.dom)}", t)
        cods.append((c, arrow.cod))
    subs: list[dict[str, UnitType]] = []
    for j, (_, v) in enumerate(apairs):
        w = match_unit(domain, prefix, v)
        if w is None:
            raise DomainMismatch(
                f"argument summand {j} of type {_show(v)} does not match the domain {_show(domain)}",
                t, j, v)
        subs.append({z: w.get(z, TVar(z)) for z in prefix})
    aligned = embed([(c, _forall(prefix, Arrow(domain, cod))) for c, cod in cods])
    fun_prem = df if alpha_eq_ty(aligned, df.type) else Derivation("equiv", ctx, t.fun, aligned, (df,))
    arg_ty = embed(apairs)
    arg_prem = da if alpha_eq_ty(arg_ty, da.type) else Derivation("equiv", ctx, t.arg, arg_ty, (da,))
    ty = _app_type(cods, apairs, subs)
    payload = {"prefix": tuple(prefix), "domain": domain, "cods": tuple(cods),
               "args": tuple(apairs), "subs": tuple(subs)}
    return _canonical(Derivation("->E", ctx, t, ty, (fun_prem, arg_prem), payload))


def _forall(xs: list[str] | tuple[str, ...], u: UnitType) -> UnitType:
    for x in reversed(xs):
        u = Forall(x, u)
    return u


def _app_type(cods, apairs, subs) -> Type:
    return make_tsum(TScale(a * b, subst_type_many(cod, w))
                     for a, cod in cods for (b, _), w in zip(apairs, subs))


# checking against a given type

def check(ctx: Mapping[str, UnitType], t: Term, expected: Type) -> Derivation:
    """Derive ``ctx |- t : expected``, using quantifier steps when the inferred
    type is only below ``expected`` in the generalization preorder."""
    ctx = dict(ctx)
    d = infer(ctx, t)
    if equiv(d.type, expected):
        return d if alpha_eq_ty(d.type, expected) else Derivation("equiv", ctx, t, expected, (d,))
    chain = prec_chain(d.type, expected, held=context_ftv(ctx))
    if chain is None and context_ftv(ctx) and prec_chain(d.type, expected) is not None:
        raise EscapingTypeVar(
            f"{_show(expected)} needs to generalize a type variable free in the context", t)
    if chain is None:
        raise TypeMismatch(
            f"expected {_show(canon_type(expected))}, inferred {_show(d.type)}",
            t, d.type, canon_type(expected))
    for nxt in chain[1:]:
        d = _quantifier_step(d, nxt)
    if not alpha_eq_ty(d.type, expected):
        d = Derivation("equiv", ctx, t, expected, (d,))
    return d


def _quantifier_step(d: Derivation, nxt: Type) -> Derivation:
    """Extend ``d`` (canonical) by one generalization or instantiation reaching ``nxt``."""
    pairs = canon_pairs(d.type)
    npairs = canon_pairs(nxt)
    if len(pairs) == len(npairs) and all(isinstance(u, Forall) for _, u in npairs):
        # try generalization over the variable of the first summand
        x = npairs[0][1].var
        gen = map_units(d.type, lambda u: Forall(x, u))
        if equiv(gen, nxt) and x not in context_ftv(d.ctx):
            return _canonical(Derivation("forallI", d.ctx, d.term, gen, (d,), {"var": x}))
    if all(isinstance(u, Forall) for _, u in pairs):
        x = fresh("X", set().union(*(type_free_vars(u) for _, u in pairs)) | {u.var for _, u in pairs})
        common = embed([(c, Forall(x, subst_type(u.body, u.var, TVar(x)))) for c, u in pairs])
        prem = d if alpha_eq_ty(common, d.type) else Derivation("equiv", d.ctx, d.term, common, (d,))
        for v in _instances(common, nxt):
            inst = map_units(common, lambda u: subst_type(u.body, u.var, v))
            if equiv(inst, nxt):
                return _canonical(Derivation("forallE", d.ctx, d.term, inst, (prem,), {"type": v}))
    raise TypeMismatch("no quantifier step found", d.term, d.type, nxt)


def _instances(common: Type, nxt: Type):
    from .typesys import unit_subterms

    pairs = canon_pairs(common)
    c0, u0 = pairs[0]
    for c1, v1 in canon_pairs(nxt):
        w = match_unit(u0.body, [u0.var], v1)
        if w is not None and u0.var in w:
            yield w[u0.var]
    yield from unit_subterms(nxt)
    yield TVar(u0.var)


# replay

@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    path: tuple[int, ...] = ()
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def replay(d: Derivation) -> ReplayResult:
    """Validate every node of ``d`` locally, without search."""
    return _replay(d, ())


def _replay(d: Derivation, path: tuple[int, ...]) -> ReplayResult:
    msg = _check_node(d)
    if msg:
        return ReplayResult(False, path, f"[{d.rule}] {msg}")
    for i, p in enumerate(d.premises):
        r = _replay(p, path + (i,))
        if not r:
            return r
    return ReplayResult(True)


def _same_ctx(a: Mapping, b: Mapping) -> bool:
    return a.keys() == b.keys() and all(alpha_eq_ty(a[k], b[k]) for k in a)


def _check_node(d: Derivation) -> str:
    t, ps, ty = d.term, d.premises, d.type
    if d.rule == "ax":
        if not isinstance(t, Var) or t.name not in d.ctx:
            return "variable not in context"
        return "" if alpha_eq_ty(d.ctx[t.name], ty) else "type differs from context"
    if d.rule == "->I":
        if not isinstance(t, Abs) or t.ty is None or len(ps) != 1:
            return "malformed abstraction"
        p = ps[0]
        if not _same_ctx(p.ctx, {**d.ctx, t.var: t.ty}) or p.term != t.body:
            return "premise does not match the body"
        return "" if alpha_eq_ty(ty, Arrow(t.ty, p.type)) else "conclusion is not U->T"
    if len(ps) < 1 or any(not _same_ctx(p.ctx, d.ctx) for p in ps):
        return "premise context differs"
    if d.rule == "0I":
        if not isinstance(t, Zero) or ps[0].term != t.witness:
            return "premise is not the witness"
        return "" if alpha_eq_ty(ty, TScale(Scalar.of(0), ps[0].type)) else "conclusion is not 0.T"
    if d.rule == "alphaI":
        if not isinstance(t, Scale) or ps[0].term != t.body:
            return "malformed scaling"
        return "" if alpha_eq_ty(ty, TScale(t.scalar, ps[0].type)) else "conclusion is not a.T"
    if d.rule == "+I":
        if not isinstance(t, Sum) or len(ps) != 2 or ps[0].term != t.left or ps[1].term != t.right:
            return "malformed sum"
        return "" if alpha_eq_ty(ty, TSum(ps[0].type, ps[1].type)) else "conclusion is not T+R"
    if d.rule == "equiv":
        if ps[0].term != t:
            return "premise term differs"
        return "" if equiv(ps[0].type, ty) else "types are not equivalent"
    if d.rule == "forallI":
        x = d.payload.get("var")
        body = t
        if isinstance(t, TyAbs):
            body = t.body if t.var == x else subst_term_type(t.body, {t.var: TVar(x)})
        if ps[0].term != body:
            return "premise term differs"
        if x in context_ftv(d.ctx):
            return f"{x} is free in the context"
        return "" if alpha_eq_ty(ty, map_units(ps[0].type, lambda u: Forall(x, u))) else "bad generalization"
    if d.rule == "forallE":
        v = d.payload.get("type")
        if ps[0].term != (t.body if isinstance(t, TyApp) else t):
            return "premise term differs"
        if isinstance(t, TyApp) and not alpha_eq_ty(t.ty, v):
            return "type argument differs"
        if not all(isinstance(u, Forall) for u in _raw_units(ps[0].type)):
            return "premise summand is not quantified"
        expect = map_units(ps[0].type, lambda u: subst_type(u.body, u.var, v))
        return "" if alpha_eq_ty(ty, expect) else "bad instantiation"
    if d.rule == "->E":
        return _check_app(d)
    return f"unknown rule {d.rule}"


def _check_app(d: Derivation) -> str:
    t, ps, pl = d.term, d.premises, d.payload
    if not isinstance(t, App) or len(ps) != 2 or ps[0].term != t.fun or ps[1].term != t.arg:
        return "malformed application"
    try:
        prefix, domain, cods, args, subs = (pl["prefix"], pl["domain"], pl["cods"],
                                            pl["args"], pl["subs"])
    except KeyError:
        return "missing payload"
    fun_ty = embed([(c, _forall(prefix, Arrow(domain, cod))) for c, cod in cods])
    if not alpha_eq_ty(ps[0].type, fun_ty):
        return "function premise is not of the form sum a_i.forall X.(U->T_i)"
    if not alpha_eq_ty(ps[1].type, embed(list(args))) or len(subs) != len(args):
        return "argument premise does not match the payload"
    for j, ((_, v), w) in enumerate(zip(args, subs)):
        if set(w) - set(prefix) or not equiv_unit(subst_type_many(domain, w), v):
            return f"instantiation {j} does not map the domain to the argument type"
    return "" if alpha_eq_ty(d.type, _app_type(cods, args, subs)) else "conclusion differs"
