"""Type algebra: equivalence, canonical forms, the preorder generated by
quantifier introduction/elimination, the reduction order, and matching."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .scalar import Scalar
from .syntax import (
    Arrow, Forall, TScale, TSum, TVar, Type, UnitType, fresh, make_tsum,
    subst_type, subst_type_many, type_free_vars,
)

__all__ = [
    "CanonicalType", "MissingEvidence", "canon", "canon_pairs", "canon_type",
    "embed", "equiv", "equiv_unit", "tkey", "ukey", "prec_step", "prec_chain",
    "preceq", "match_unit", "order_leq", "unit_subterms",
]

Pair = tuple[Scalar, UnitType]


class MissingEvidence(ValueError):
    """The order needs a factorisation instance but no typing evidence was given."""


# keys and canonical forms

def _decompose(t: Type, coef: Scalar, out: list[Pair]) -> None:
    if isinstance(t, TScale):
        _decompose(t.body, coef * t.scalar, out)
    elif isinstance(t, TSum):
        _decompose(t.left, coef, out)
        _decompose(t.right, coef, out)
    else:
        out.append((coef, t))


def ukey(u: UnitType, env: Optional[Mapping[str, int]] = None, depth: int = 0) -> tuple:
    """Key of a unit type; equal keys iff the unit types are equivalent."""
    env = env or {}
    if isinstance(u, TVar):
        return ("b", depth - 1 - env[u.name]) if u.name in env else ("f", u.name)
    if isinstance(u, Arrow):
        return ("arr", ukey(u.dom, env, depth), tkey(u.cod, env, depth))
    if isinstance(u, Forall):
        return ("all", ukey(u.body, {**env, u.var: depth}, depth + 1))
    raise TypeError(f"not a unit type: {u!r}")


def tkey(t: Type, env: Optional[Mapping[str, int]] = None, depth: int = 0) -> tuple:
    """Key of a type; equal keys iff the types are equivalent."""
    merged: dict[tuple, Scalar] = {}
    raw: list[Pair] = []
    _decompose(t, Scalar.of(1), raw)
    for c, u in raw:
        k = ukey(u, env, depth)
        merged[k] = merged[k] + c if k in merged else c
    return tuple(sorted(((k, c.key()) for k, c in merged.items()), key=repr))


def _norm_unit(u: UnitType) -> UnitType:
    if isinstance(u, TVar):
        return u
    if isinstance(u, Arrow):
        return Arrow(_norm_unit(u.dom), canon_type(u.cod))
    if isinstance(u, Forall):
        return Forall(u.var, _norm_unit(u.body))
    raise TypeError(u)


def canon_pairs(t: Type) -> list[Pair]:
    """Scaled, pairwise non-equivalent unit summands, in order of first appearance.

    Zero coefficients are kept; codomains of arrows are canonical too."""
    raw: list[Pair] = []
    _decompose(t, Scalar.of(1), raw)
    order: list[tuple] = []
    acc: dict[tuple, list] = {}
    for c, u in raw:
        k = ukey(u)
        if k in acc:
            acc[k][0] = acc[k][0] + c
        else:
            acc[k] = [c, _norm_unit(u)]
            order.append(k)
    return [(acc[k][0], acc[k][1]) for k in order]


def embed(pairs: Sequence[Pair]) -> Type:
    if not pairs:
        raise ValueError("a type has at least one summand")
    return make_tsum(u if c.is_one() else TScale(c, u) for c, u in pairs)


@dataclass(frozen=True)
class CanonicalType:
    pairs: tuple[Pair, ...]

    def embed(self) -> Type:
        return embed(self.pairs)

    def units(self) -> list[UnitType]:
        return [u for _, u in self.pairs]

    def coefficients(self) -> list[Scalar]:
        return [c for c, _ in self.pairs]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CanonicalType):
            return NotImplemented
        return tkey(self.embed()) == tkey(other.embed())

    def __hash__(self) -> int:
        return hash(tkey(self.embed()))


def canon(t: Type) -> CanonicalType:
    return CanonicalType(tuple(canon_pairs(t)))


def canon_type(t: Type) -> Type:
    return embed(canon_pairs(t))


def equiv(t: Type, r: Type) -> bool:
    return tkey(t) == tkey(r)


def equiv_unit(u: UnitType, v: UnitType) -> bool:
    return ukey(u) == ukey(v)


def unit_subterms(t: Type) -> list[UnitType]:
    """All unit types occurring in ``t`` (binders' variables included as free)."""
    out: list[UnitType] = []
    seen: set = set()

    def visit(x: Type) -> None:
        if isinstance(x, (TScale,)):
            visit(x.body)
            return
        if isinstance(x, TSum):
            visit(x.left)
            visit(x.right)
            return
        k = ukey(x)
        if k not in seen:
            seen.add(k)
            out.append(x)
        if isinstance(x, Arrow):
            visit(x.dom)
            visit(x.cod)
        elif isinstance(x, Forall):
            visit(x.body)

    visit(t)
    return out


# the preorder generated by generalization and instantiation

def prec_step(t: Type, gen_vars: Optional[Iterable[str]] = None,
              candidates: Optional[Iterable[UnitType]] = None,
              held: Iterable[str] = ()) -> list[Type]:
    """One-step successors: quantify every summand over the same variable, or
    instantiate every (quantified) summand with the same unit type."""
    pairs = canon_pairs(t)
    held = frozenset(held)
    fv = type_free_vars(t)
    if gen_vars is None:
        gen_vars = sorted(fv) + [fresh("X", fv | held)]
    out: list[Type] = []
    for x in gen_vars:
        if x not in held:
            out.append(embed([(c, Forall(x, u)) for c, u in pairs]))
    if all(isinstance(u, Forall) for _, u in pairs):
        if candidates is None:
            candidates = unit_subterms(t) + [TVar(fresh("X", fv | held))]
        for v in candidates:
            out.append(embed([(c, subst_type(u.body, u.var, v)) for c, u in pairs]))
    return out


def _bound_names(t: Type) -> set[str]:
    out: set[str] = set()

    def visit(x: Type) -> None:
        if isinstance(x, Forall):
            out.add(x.var)
            visit(x.body)
        elif isinstance(x, Arrow):
            visit(x.dom)
            visit(x.cod)
        elif isinstance(x, (TScale,)):
            visit(x.body)
        elif isinstance(x, TSum):
            visit(x.left)
            visit(x.right)

    visit(t)
    return out


def prec_chain(t: Type, r: Type, budget: int = 400, held: Iterable[str] = ()) -> Optional[list[Type]]:
    """A chain ``t = S1 < S2 < ... = r`` (up to equivalence) or ``None`` within budget."""
    held = frozenset(held)
    target = tkey(r)
    if tkey(t) == target:
        return [t]
    if len(canon_pairs(r)) > len(canon_pairs(t)):
        return None  # neither step can split a summand
    names = type_free_vars(t) | type_free_vars(r) | _bound_names(r) | _bound_names(t)
    spare = fresh("X", names | held)
    cands = unit_subterms(r) + [TVar(n) for n in sorted(names)] + [TVar(spare)]
    gen_pool = sorted(names | {spare})
    limit = _size(r) + _size(t) + 4
    start = canon_type(t)
    parents: dict[tuple, Optional[tuple]] = {tkey(start): None}
    types = {tkey(start): start}
    queue = deque([start])
    expanded = 0
    while queue and expanded < budget:
        cur = queue.popleft()
        expanded += 1
        ck = tkey(cur)
        for nxt in prec_step(cur, gen_pool, cands, held):
            nk = tkey(nxt)
            if nk in parents or _size(nxt) > limit:
                continue
            parents[nk] = ck
            types[nk] = nxt
            if nk == target:
                chain = [nxt]
                k = ck
                while k is not None:
                    chain.append(types[k])
                    k = parents[k]
                chain.reverse()
                chain[0] = t
                return chain
            queue.append(nxt)
    return None


def preceq(t: Type, r: Type, budget: int = 400, held: Iterable[str] = ()) -> bool:
    return prec_chain(t, r, budget, held) is not None


def _size(t: Type) -> int:
    if isinstance(t, TVar):
        return 1
    if isinstance(t, Arrow):
        return 1 + _size(t.dom) + _size(t.cod)
    if isinstance(t, (Forall, TScale)):
        return 1 + _size(t.body)
    return 1 + _size(t.left) + _size(t.right)


# matching

def match_unit(u: UnitType, pattern_vars: Iterable[str], v: UnitType) -> Optional[dict[str, UnitType]]:
    """Assignment ``W`` of unit types to ``pattern_vars`` with ``u[W] == v``
    (modulo equivalence and alpha), or ``None``.

    Variables of ``pattern_vars`` that do not occur in ``u`` are left unassigned."""
    pv = frozenset(pattern_vars)
    for sub in _match(u, v, pv, {}, {}, {}, 0):
        full = {x: sub[x] for x in sub}
        if equiv_unit(subst_type_many(u, full), v):
            return full
    return None


def _match(u, v, pv, sub, benv_u, benv_v, depth):
    if isinstance(u, TVar):
        if u.name in benv_u:
            if isinstance(v, TVar) and benv_v.get(v.name) == benv_u[u.name]:
                yield sub
            return
        if u.name in pv:
            if type_free_vars(v) & set(benv_v):
                return
            if u.name in sub:
                if equiv_unit(sub[u.name], v):
                    yield sub
                return
            yield {**sub, u.name: v}
            return
        if isinstance(v, TVar) and v.name == u.name and v.name not in benv_v:
            yield sub
        return
    if isinstance(u, Arrow):
        if not isinstance(v, Arrow):
            return
        for s1 in _match(u.dom, v.dom, pv, sub, benv_u, benv_v, depth):
            yield from _match_sum(canon_pairs(u.cod), canon_pairs(v.cod), pv, s1, benv_u, benv_v, depth)
        return
    if isinstance(u, Forall):
        if not isinstance(v, Forall):
            return
        yield from _match(u.body, v.body, pv, sub, {**benv_u, u.var: depth},
                          {**benv_v, v.var: depth}, depth + 1)


def _match_sum(ps, qs, pv, sub, benv_u, benv_v, depth):
    if len(ps) != len(qs):
        return
    if not ps:
        yield sub
        return
    (c, u), rest = ps[0], ps[1:]
    for k, (d, w) in enumerate(qs):
        if c != d:
            continue
        for s1 in _match(u, w, pv, sub, benv_u, benv_v, depth):
            yield from _match_sum(rest, qs[:k] + qs[k + 1:], pv, s1, benv_u, benv_v, depth)


# the reduction order

def _evidence_types(evidence) -> list[tuple[Type, Type]]:
    out = []
    for a, b in evidence or ():
        out.append((getattr(a, "type", a), getattr(b, "type", b)))
    return out


def order_leq(s: Type, t: Type, evidence: Iterable = (), budget: int = 300,
              held: Optional[Iterable[str]] = None) -> bool:
    """Decide ``s`` below ``t`` in the reduction order by bounded search.

    ``evidence`` lists pairs ``(P, P')`` (types, or derivations with a
    ``type``) of one and the same term; each pair licenses the factorisation
    ``(a+b).P <= a.P + b.P'``.  Raises :class:`MissingEvidence` when the
    answer would be yes if every pair of summands of ``t`` were such evidence.

    Type variables in ``held`` (default: all free variables of ``s`` and
    ``t``) and variables bound by quantifiers crossed by congruence are never
    generalized.
    """
    ev = _evidence_types(evidence)
    held = frozenset(type_free_vars(s) | type_free_vars(t) if held is None else held)
    if _order_search(s, t, ev, budget, held):
        return True
    if not ev:
        units = [u for _, u in canon_pairs(t)]
        pseudo = [(a, b) for a, b in itertools.permutations(units, 2)]
        if pseudo and _order_search(s, t, pseudo, budget, held):
            raise MissingEvidence("factorisation needed: supply typing evidence")
    return False


def _vec(t: Type) -> dict[tuple, list]:
    """Canonical type as an ordered map ``ukey -> [coef, unit]``."""
    return {ukey(u): [c, u] for c, u in canon_pairs(t)}


def _from_vec(vec: Mapping[tuple, list]) -> Type:
    return embed([(c, u) for c, u in vec.values()])


def _order_search(s: Type, t: Type, ev: list[tuple[Type, Type]], budget: int,
                  held: frozenset[str]) -> bool:
    goal = _vec(s)
    start = canon_type(t)
    seen = {tkey(start)}
    queue = deque([start])
    expanded = 0
    while queue and expanded < budget:
        cur = queue.popleft()
        expanded += 1
        if equiv(s, cur) or preceq(s, cur, budget=60, held=held):
            return True
        for nxt in _order_moves(cur, goal, ev, budget, held):
            k = tkey(nxt)
            if k not in seen:
                seen.add(k)
                queue.append(nxt)
    return False


def _order_moves(cur: Type, goal: dict, ev: list, budget: int, held: frozenset[str]) -> list[Type]:
    vec = _vec(cur)
    out: list[Type] = []
    # drop a zero-coefficient summand
    if len(vec) > 1:
        for k, (c, _) in vec.items():
            if c.is_zero():
                out.append(_from_vec({j: v for j, v in vec.items() if j != k}))
    # factorisation licensed by evidence
    for p, p2 in ev:
        for a, b in ((p, p2), (p2, p)):
            out.extend(_factor_moves(vec, _vec(a), _vec(b), goal))
    # congruence: replace one unit by a smaller unit of the goal
    for k, (c, u) in vec.items():
        for gk, (_, w) in goal.items():
            if gk != k and _unit_leq(w, u, ev, budget, held):
                new = {j: list(v) for j, v in vec.items() if j != k}
                if gk in new:
                    new[gk][0] = new[gk][0] + c
                else:
                    new[gk] = [c, w]
                out.append(_from_vec(new))
    return out


def _factor_moves(vec: dict, pv: dict, qv: dict, goal: dict) -> list[Type]:
    """``rest + a.P + b.P'  ~>  rest + (a+b).P`` for goal-directed ``b``."""
    if not (set(pv) | set(qv)) <= set(vec):
        return []
    betas = []
    for k in set(pv) | set(qv):
        diff = (pv[k][0] if k in pv else Scalar.of(0)) - (qv[k][0] if k in qv else Scalar.of(0))
        if diff.is_zero():
            continue
        want = goal[k][0] if k in goal else Scalar.of(0)
        beta = (want - vec[k][0]) / diff
        if beta not in betas:
            betas.append(beta)
    out = []
    for beta in betas:
        new: dict[tuple, list] = {}
        for k, (c, u) in vec.items():
            d = c + beta * ((pv[k][0] if k in pv else Scalar.of(0)) - (qv[k][0] if k in qv else Scalar.of(0)))
            if k in pv or not (k in qv and d.is_zero()):
                new[k] = [d, u]
        if new:
            out.append(_from_vec(new))
    return out


def _unit_leq(a: UnitType, b: UnitType, ev: list, budget: int, held: frozenset[str]) -> bool:
    if equiv_unit(a, b) or preceq(a, b, budget=60, held=held):
        return True
    if isinstance(a, Arrow) and isinstance(b, Arrow) and equiv_unit(a.dom, b.dom):
        return _order_search(a.cod, b.cod, ev, budget // 2, held)
    if isinstance(a, Forall) and isinstance(b, Forall):
        if a.var != b.var and a.var in type_free_vars(b.body):
            return False
        body_b = subst_type(b.body, b.var, TVar(a.var))
        return _unit_leq(a.body, body_b, ev, budget // 2, held | {a.var})
    return False
