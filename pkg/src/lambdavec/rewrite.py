"""One-step reduction modulo AC, normalization strategies, traces and joins.

Sums are handled as flat lists of summands: a path step ``"+i"`` selects the
i-th summand of a maximal sum, and the sum-level rules (F1-F4 and the
distributions E5, A1, A2) act on that list.  Annotated terms are first put
in *tidy* form, where type abstraction/application never sits directly above
a sum, a scaled term or a zero; tidying does not change the erased term.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional

from .scalar import Scalar
from .syntax import (
    Abs, App, Scale, Sum, Term, TVar, TyAbs, TyApp, UnitType, Var, Zero,
    erase, is_basis, is_erased, make_sum, subst_term, subst_term_type, summands,
)

__all__ = [
    "RULES", "group", "RewriteStep", "Trace", "FuelExhausted", "tidy",
    "one_step", "apply_rule", "replay_step", "normalize", "normalize_no_F",
    "join", "ac_key", "alpha_key", "is_normal", "DEFAULT_FUEL", "STRATEGIES",
]

RULES = ("E1", "E2", "E3", "E4", "E5", "F1", "F2", "F3", "F4", "B",
         "A1", "A2", "A3", "A4", "A5", "A6")
DEFAULT_FUEL = 100_000

Path = tuple[str, ...]


def group(rule: str) -> str:
    if rule not in RULES:
        raise ValueError(f"unknown rule {rule!r}")
    return rule[0]


class FuelExhausted(RuntimeError):
    def __init__(self, trace: "Trace"):
        super().__init__(f"fuel exhausted after {len(trace.steps)} steps")
        self.trace = trace


@dataclass(frozen=True)
class RewriteStep:
    rule: str
    path: Path
    redex: Term
    contractum: Term
    result: Term
    detail: tuple = ()

    def line(self, show: Callable[[Term], str]) -> str:
        where = "/".join(self.path) or "."
        return f"{self.rule} @ {where} : {show(self.redex)} => {show(self.contractum)}"

    def to_dict(self, show: Callable[[Term], str]) -> dict:
        return {"rule": self.rule, "path": list(self.path), "detail": list(self.detail),
                "before": show(self.redex), "after": show(self.contractum)}


@dataclass
class Trace:
    initial: Term
    steps: list[RewriteStep] = field(default_factory=list)
    final: Optional[Term] = None

    def text(self, show: Callable[[Term], str]) -> str:
        return "\n".join(s.line(show) for s in self.steps)

    def dump(self, show: Callable[[Term], str]) -> str:
        return json.dumps({
            "initial": show(self.initial),
            "steps": [s.to_dict(show) for s in self.steps],
            "final": show(self.final) if self.final is not None else None,
        }, indent=2)


# tidy form

def tidy(t: Term) -> Term:
    """Push type abstraction/application through sums, scalars and zeros and
    contract ``(/\\X. t)[V]``.  Identity on erased terms."""
    if isinstance(t, (Var,)) or (isinstance(t, Zero) and t.witness is None):
        return t
    if isinstance(t, Abs):
        body = tidy(t.body)
        return t if body is t.body else Abs(t.var, t.ty, body)
    if isinstance(t, App):
        f, a = tidy(t.fun), tidy(t.arg)
        return t if (f is t.fun and a is t.arg) else App(f, a)
    if isinstance(t, Zero):
        w = tidy(t.witness)
        return t if w is t.witness else Zero(w)
    if isinstance(t, Scale):
        body = tidy(t.body)
        return t if body is t.body else Scale(t.scalar, body)
    if isinstance(t, Sum):
        left, right = tidy(t.left), tidy(t.right)
        return t if (left is t.left and right is t.right) else Sum(left, right)
    if isinstance(t, TyAbs):
        return _tyabs(t.var, tidy(t.body), t)
    if isinstance(t, TyApp):
        return _tyapp(tidy(t.body), t.ty, t)
    raise TypeError(t)


def _tyabs(var: str, body: Term, orig: Optional[Term] = None) -> Term:
    if isinstance(body, Sum):
        return make_sum(_tyabs(var, s) for s in summands(body))
    if isinstance(body, Scale):
        return Scale(body.scalar, _tyabs(var, body.body))
    if isinstance(body, Zero):
        return Zero(_tyabs(var, body.witness)) if body.witness is not None else body
    if orig is not None and body is orig.body:
        return orig
    return TyAbs(var, body)


def _tyapp(body: Term, ty: UnitType, orig: Optional[Term] = None) -> Term:
    if isinstance(body, Sum):
        return make_sum(_tyapp(s, ty) for s in summands(body))
    if isinstance(body, Scale):
        return Scale(body.scalar, _tyapp(body.body, ty))
    if isinstance(body, Zero):
        return Zero(_tyapp(body.witness, ty)) if body.witness is not None else body
    if isinstance(body, TyAbs):
        return tidy(subst_term_type(body.body, {body.var: ty}))
    if orig is not None and body is orig.body:
        return orig
    return TyApp(body, ty)


# keys

def alpha_key(t: Term) -> tuple:
    """Hashable key of the erased term, equal iff alpha-equivalent (sums flattened, order kept)."""
    return _key(erase(t), {}, 0, False)


def ac_key(t: Term) -> tuple:
    """Like :func:`alpha_key` but insensitive to the order of summands."""
    return _key(erase(t), {}, 0, True)


def _key(t: Term, env: dict, depth: int, ac: bool) -> tuple:
    if isinstance(t, Var):
        return ("b", depth - 1 - env[t.name]) if t.name in env else ("v", t.name)
    if isinstance(t, Abs):
        return ("lam", _key(t.body, {**env, t.var: depth}, depth + 1, ac))
    if isinstance(t, App):
        return ("app", _key(t.fun, env, depth, ac), _key(t.arg, env, depth, ac))
    if isinstance(t, Zero):
        return ("zero",)
    if isinstance(t, Scale):
        return ("scale", t.scalar.key(), _key(t.body, env, depth, ac))
    if isinstance(t, Sum):
        parts = [_key(s, env, depth, ac) for s in summands(t)]
        if ac:
            parts.sort(key=repr)
        return ("sum", tuple(parts))
    raise TypeError(t)


# positions

def _positions(t: Term, path: Path, ctx: dict) -> Iterator[tuple[Path, Term, dict]]:
    """All reduction positions in post-order (children before the node)."""
    if isinstance(t, Sum):
        for i, s in enumerate(summands(t)):
            yield from _positions(s, path + (f"+{i}",), ctx)
    elif isinstance(t, Abs):
        inner = dict(ctx)
        if t.ty is not None:
            inner[t.var] = t.ty
        else:
            inner.pop(t.var, None)
        yield from _positions(t.body, path + ("body",), inner)
    elif isinstance(t, App):
        yield from _positions(t.fun, path + ("fun",), ctx)
        yield from _positions(t.arg, path + ("arg",), ctx)
    elif isinstance(t, (Scale, TyAbs, TyApp)):
        yield from _positions(t.body, path + ("body",), ctx)
    yield (path, t, ctx)


def _get(t: Term, path: Path) -> Term:
    for step in path:
        if step.startswith("+"):
            t = summands(t)[int(step[1:])]
        elif step == "fun":
            t = t.fun
        elif step == "arg":
            t = t.arg
        else:
            t = t.body
    return t


def _replace(t: Term, path: Path, new: Term) -> Term:
    if not path:
        return new
    step, rest = path[0], path[1:]
    if step.startswith("+"):
        parts = summands(t)
        i = int(step[1:])
        parts[i] = _replace(parts[i], rest, new)
        return make_sum(parts)
    if step == "fun":
        return App(_replace(t.fun, rest, new), t.arg)
    if step == "arg":
        return App(t.fun, _replace(t.arg, rest, new))
    if isinstance(t, Abs):
        return Abs(t.var, t.ty, _replace(t.body, rest, new))
    if isinstance(t, Scale):
        return Scale(t.scalar, _replace(t.body, rest, new))
    if isinstance(t, TyAbs):
        return TyAbs(t.var, _replace(t.body, rest, new))
    if isinstance(t, TyApp):
        return TyApp(_replace(t.body, rest, new), t.ty)
    raise ValueError(f"bad path step {step!r}")


def _ctx_at(t: Term, path: Path, ctx: Mapping[str, UnitType]) -> dict:
    inner = dict(ctx)
    for step in path:
        if isinstance(t, Abs):
            if t.ty is not None:
                inner[t.var] = t.ty
            else:
                inner.pop(t.var, None)
        t = _get(t, (step,))
    return inner


# node-level rules

def _peel(parts: list[Term]) -> range:
    return range(1) if len(parts) == 2 else range(len(parts))


def _split(parts: list[Term], i: int) -> tuple[Term, Term]:
    rest = parts[:i] + parts[i + 1:]
    return parts[i], make_sum(rest)


def _zero(w: Optional[Term], annotated: bool) -> Zero:
    return Zero(w if annotated else None)


def _node_redexes(t: Term, annotated: bool, ctx: Mapping[str, UnitType]) -> Iterator[tuple[str, tuple]]:
    """Rule instances rooted at ``t`` as ``(rule, detail)``, in strategy priority order."""
    if isinstance(t, Scale):
        alpha, body = t.scalar, t.body
        if alpha.is_zero():
            yield ("E1", ())
        if alpha.is_one():
            yield ("E2", ())
        if isinstance(body, Zero):
            yield ("E3", ())
        if isinstance(body, Scale):
            yield ("E4", ())
        if isinstance(body, Sum):
            for i in _peel(summands(body)):
                yield ("E5", (i,))
    elif isinstance(t, Sum):
        parts = summands(t)
        for j, s in enumerate(parts):
            if isinstance(s, Zero):
                yield ("F4", (j,))
        keys = [alpha_key(s) for s in parts]
        inner = [alpha_key(s.body) if isinstance(s, Scale) else None for s in parts]
        for i in range(len(parts)):
            for j in range(i + 1, len(parts)):
                if inner[i] is not None and inner[i] == inner[j]:
                    yield ("F1", (i, j))
                if inner[i] is not None and inner[i] == keys[j]:
                    yield ("F2", (i, j))
                if inner[j] is not None and inner[j] == keys[i]:
                    yield ("F2", (j, i))
                if keys[i] == keys[j]:
                    yield ("F3", (i, j))
    elif isinstance(t, App):
        f, a = t.fun, t.arg
        if isinstance(a, Sum):
            for i in _peel(summands(a)):
                yield ("A2", (i,))
        if isinstance(a, Scale):
            yield ("A4", ())
        if isinstance(a, Zero):
            yield ("A6", ())
        if isinstance(f, Sum):
            for i in _peel(summands(f)):
                yield ("A1", (i,))
        if isinstance(f, Scale):
            yield ("A3", ())
        if isinstance(f, Zero):
            yield ("A5", ())
        if isinstance(_strip_tyabs(f)[1], Abs) and is_basis(a):
            yield ("B", ())


def _strip_tyabs(t: Term) -> tuple[list[str], Term]:
    tvars = []
    while isinstance(t, TyAbs):
        tvars.append(t.var)
        t = t.body
    return tvars, t


def _contract(t: Term, rule: str, detail: tuple, annotated: bool,
              ctx: Mapping[str, UnitType]) -> Term:
    if rule == "E1":
        return _zero(t.body, annotated)
    if rule == "E2":
        return t.body
    if rule == "E3":
        return t.body
    if rule == "E4":
        return Scale(t.scalar * t.body.scalar, t.body.body)
    if rule == "E5":
        s, rest = _split(summands(t.body), detail[0])
        return Sum(Scale(t.scalar, s), Scale(t.scalar, rest))
    if rule in ("F1", "F2", "F3", "F4"):
        return _contract_f(summands(t), rule, detail)
    f, a = t.fun, t.arg
    if rule == "A1":
        s, rest = _split(summands(f), detail[0])
        return Sum(App(s, a), App(rest, a))
    if rule == "A2":
        s, rest = _split(summands(a), detail[0])
        return Sum(App(f, s), App(f, rest))
    if rule == "A3":
        return Scale(f.scalar, App(f.body, a))
    if rule == "A4":
        return Scale(a.scalar, App(f, a.body))
    if rule == "A5":
        return _zero(App(f.witness, a) if f.witness is not None else None, annotated)
    if rule == "A6":
        return _zero(App(f, a.witness) if a.witness is not None else None, annotated)
    if rule == "B":
        return _beta(f, a, ctx)
    raise ValueError(f"unknown rule {rule!r}")


def _contract_f(parts: list[Term], rule: str, detail: tuple) -> Term:
    if rule == "F4":
        j = detail[0]
        return make_sum(parts[:j] + parts[j + 1:])
    i, j = detail
    si, sj = parts[i], parts[j]
    if rule == "F1":
        new = Scale(si.scalar + sj.scalar, si.body)
    elif rule == "F2":
        new = Scale(si.scalar + 1, si.body)
    else:
        new = Scale(Scalar.of(2), si)
    keep = list(parts)
    keep[min(i, j)] = new
    del keep[max(i, j)]
    return make_sum(keep)


def _beta(f: Term, b: Term, ctx: Mapping[str, UnitType]) -> Term:
    tvars, lam = _strip_tyabs(f)
    body = lam.body
    if tvars and lam.ty is not None:
        sub = _instantiate(tvars, lam.ty, b, ctx)
        if sub is not None:
            body = subst_term_type(body, sub)
    return subst_term(body, lam.var, b)


def _instantiate(tvars: list[str], dom: UnitType, b: Term,
                 ctx: Mapping[str, UnitType]) -> Optional[dict]:
    """Type arguments for a polymorphic binder, found by matching the argument's type."""
    from .checker import TypingError, infer
    from .typesys import canon_pairs, match_unit

    try:
        pairs = canon_pairs(infer(dict(ctx), b).type)
    except TypingError:
        return None
    if len(pairs) != 1:
        return None
    w = match_unit(dom, frozenset(tvars), pairs[0][1])
    if w is None:
        return None
    return {x: w.get(x, TVar(x)) for x in tvars}


# public API

def _annotated(t: Term) -> bool:
    return not is_erased(t)


def _build(t: Term, path: Path, rule: str, detail: tuple, annotated: bool,
           ctx: Mapping[str, UnitType]) -> RewriteStep:
    redex = _get(t, path)
    contractum = _contract(redex, rule, detail, annotated, ctx)
    if annotated:
        contractum = tidy(contractum)
    result = _replace(t, path, contractum)
    if annotated:
        result = tidy(result)
    return RewriteStep(rule, path, redex, contractum, result, detail)


_ALL = frozenset(RULES)


def one_step(t: Term, ctx: Optional[Mapping[str, UnitType]] = None,
             rules: frozenset[str] = _ALL) -> list[RewriteStep]:
    """Every single-step reduct of ``t`` (tidied first when annotated)."""
    annotated = _annotated(t)
    if annotated:
        t = tidy(t)
    out = []
    for path, node, nctx in _positions(t, (), dict(ctx or {})):
        for rule, detail in _node_redexes(node, annotated, nctx):
            if rule in rules:
                out.append(_build(t, path, rule, detail, annotated, nctx))
    return out


def apply_rule(t: Term, rule: str, path: Path, detail: tuple = (),
               ctx: Optional[Mapping[str, UnitType]] = None) -> Term:
    """Apply ``rule`` at ``path``; raises ``ValueError`` if it is not a redex there."""
    annotated = _annotated(t)
    if annotated:
        t = tidy(t)
    nctx = _ctx_at(t, path, ctx or {})
    node = _get(t, path)
    if (rule, tuple(detail)) not in set(_node_redexes(node, annotated, nctx)):
        raise ValueError(f"{rule} does not apply at {'/'.join(path) or '.'}")
    return _build(t, path, rule, tuple(detail), annotated, nctx).result


def replay_step(before: Term, step: RewriteStep,
                ctx: Optional[Mapping[str, UnitType]] = None) -> bool:
    try:
        after = apply_rule(before, step.rule, step.path, step.detail, ctx)
    except (ValueError, IndexError, AttributeError):
        return False
    return after == step.result


def is_normal(t: Term, rules: frozenset[str] = _ALL) -> bool:
    return _first_redex(t, rules, "innermost", {}) is None


STRATEGIES = ("innermost", "algebraic-first")


def _first_redex(t: Term, rules: frozenset[str], strategy: str,
                 ctx: Mapping[str, UnitType]) -> Optional[tuple[Path, str, tuple, dict]]:
    annotated = _annotated(t)
    if strategy == "innermost":
        for path, node, nctx in _positions(t, (), dict(ctx)):
            for rule, detail in _node_redexes(node, annotated, nctx):
                if rule in rules:
                    return path, rule, detail, nctx
        return None
    if strategy == "algebraic-first":
        algebraic = frozenset(r for r in rules if r != "B")
        found = _first_redex(t, algebraic, "innermost", ctx)
        if found is None and "B" in rules:
            found = _first_redex(t, frozenset(("B",)), "innermost", ctx)
        return found
    raise ValueError(f"unknown strategy {strategy!r}")


def normalize(t: Term, fuel: int = DEFAULT_FUEL, strategy: str = "innermost",
              ctx: Optional[Mapping[str, UnitType]] = None,
              rules: frozenset[str] = _ALL) -> Trace:
    """Reduce until no redex remains.

    ``innermost`` contracts the leftmost redex whose subterms are all normal,
    preferring algebraic rules over beta at the same node.
    ``algebraic-first`` only fires beta when no algebraic redex is left.
    """
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    annotated = _annotated(t)
    cur = tidy(t) if annotated else t
    trace = Trace(t)
    ctx = dict(ctx or {})
    while True:
        found = _first_redex(cur, rules, strategy, ctx)
        if found is None:
            trace.final = cur
            return trace
        if len(trace.steps) >= fuel:
            trace.final = cur
            raise FuelExhausted(trace)
        path, rule, detail, nctx = found
        step = _build(cur, path, rule, detail, annotated, nctx)
        trace.steps.append(step)
        cur = step.result


NO_F = frozenset(r for r in RULES if r not in ("F1", "F2", "F3"))


def normalize_no_F(t: Term, fuel: int = DEFAULT_FUEL, strategy: str = "innermost",
                   ctx: Optional[Mapping[str, UnitType]] = None) -> Trace:
    """Normalize with the factorisation rules F1-F3 disabled (F4 stays)."""
    return normalize(t, fuel, strategy, ctx, NO_F)


def join(t1: Term, t2: Term, fuel: int = 10_000,
         ctx: Optional[Mapping[str, UnitType]] = None) -> Optional[Term]:
    """A common reduct of ``t1`` and ``t2`` modulo AC and alpha, or ``None``.

    Tries the normal forms first, then a breadth-first search over both
    reduction graphs that expands at most ``fuel`` terms in total.
    """
    if ac_key(t1) == ac_key(t2):
        return t1
    try:
        n1 = normalize(t1, fuel, ctx=ctx).final
        n2 = normalize(t2, fuel, ctx=ctx).final
        if ac_key(n1) == ac_key(n2):
            return n1
    except FuelExhausted:
        pass
    seen = [{ac_key(t1): t1}, {ac_key(t2): t2}]
    queues = [deque([t1]), deque([t2])]
    expanded = 0
    while expanded < fuel and (queues[0] or queues[1]):
        for side in (0, 1):
            if not queues[side]:
                continue
            cur = queues[side].popleft()
            expanded += 1
            for step in one_step(cur, ctx):
                k = ac_key(step.result)
                if k in seen[1 - side]:
                    return step.result
                if k not in seen[side]:
                    seen[side][k] = step.result
                    queues[side].append(step.result)
    return None
