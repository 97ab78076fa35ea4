"""Executable metatheory: randomized checks of subject reduction, local
confluence, strong normalization and the typing lemmas over well-typed
generated terms and the prelude."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .checker import Derivation, TypingError, _app_type, _forall, check, context_ftv, infer
from .encodings import FALSE, I_TYPE, ID, TRUE, prelude
from .parse import parse_term, show_term, show_type
from .rewrite import (
    FuelExhausted, _ctx_at, _get, _replace, ac_key, alpha_key, group, join, normalize, one_step,
    tidy,
)
from .scalar import HALF_SQRT2, Scalar
from .syntax import (
    Abs, App, Arrow, Forall, Scale, Sum, Term, TScale, TSum, TVar, TyAbs, TyApp, Type,
    UnitType, Var, Zero, erase, fresh, is_basis, make_tsum,
    subst_term, subst_term_type, subst_type, subst_type_many, summands, term_size,
    type_free_vars,
)
from .typesys import (
    MissingEvidence, canon, canon_pairs, embed, equiv, order_leq, preceq,
)

__all__ = [
    "AuditReport", "Counterexample", "TypedTermGenerator", "audit_subject_reduction",
    "audit_local_confluence", "audit_strong_normalization", "audit_generation_lemmas",
    "audit_lemmas", "run_audit", "AUDITS", "prelude_corpus", "explore",
]


# reports

@dataclass(frozen=True)
class Counterexample:
    sample: int
    term: str
    step: str
    expected: str
    actual: str

    def to_dict(self) -> dict:
        return {"sample": self.sample, "term": self.term, "step": self.step,
                "expected": self.expected, "actual": self.actual}


@dataclass
class AuditReport:
    kind: str
    seed: int
    samples: int
    checks: dict[str, list[int]] = field(default_factory=dict)
    counterexamples: list[Counterexample] = field(default_factory=list)
    inconclusive: list[Counterexample] = field(default_factory=list)
    stats: dict[str, object] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def tally(self, name: str, passed: bool) -> bool:
        row = self.checks.setdefault(name, [0, 0])
        row[0 if passed else 1] += 1
        return passed

    def fail(self, name: str, cx: Counterexample) -> None:
        self.tally(name, False)
        self.counterexamples.append(cx)

    def text(self) -> str:
        lines = [f"audit {self.kind}: seed={self.seed} samples={self.samples} "
                 f"time={self.elapsed:.1f}s"]
        for name, (p, f) in sorted(self.checks.items()):
            lines.append(f"  {name}: {p} passed, {f} failed")
        for k, v in self.stats.items():
            lines.append(f"  {k}: {v}")
        for label, items in (("counterexample", self.counterexamples),
                             ("inconclusive", self.inconclusive)):
            for cx in items:
                lines.append(f"  {label} (sample {cx.sample}): {cx.term}")
                lines.append(f"    step: {cx.step}")
                lines.append(f"    expected: {cx.expected}")
                lines.append(f"    actual: {cx.actual}")
        lines.append(f"result: {'OK' if self.ok else 'COUNTEREXAMPLES FOUND'} "
                     f"({len(self.counterexamples)} counterexamples, "
                     f"{len(self.inconclusive)} inconclusive)")
        return "\n".join(lines)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "seed": self.seed, "samples": self.samples,
                "checks": {k: {"passed": p, "failed": f} for k, (p, f) in self.checks.items()},
                "counterexamples": [c.to_dict() for c in self.counterexamples],
                "inconclusive": [c.to_dict() for c in self.inconclusive],
                "stats": self.stats, "ok": self.ok}

    def dump(self) -> str:
        return json.dumps(self.to_dict(), indent=2, default=str)


# generation of well-typed annotated terms

_SCALARS = tuple(Scalar.of(Fraction(n, d)) for n, d in ((1, 1), (2, 1), (-1, 1), (1, 2), (-3, 2), (1, 3))) + (
    Scalar(0, 0, 1), Scalar(1, 0, 1), Scalar(Fraction(1, 2), 0, Fraction(-1, 2)), HALF_SQRT2, -HALF_SQRT2,
)


@dataclass(frozen=True)
class TypedTermGenerator:
    """Random closed annotated terms that infer accepts, of erased size at most ``max_size``.

    Productions are chosen top-down with the remaining size budget; application
    nodes get functions whose domains match their arguments by construction.
    Sums deliberately repeat subterms (possibly at different type instances)
    so that factorisation redexes are common.
    """

    max_size: int = 14
    seed: int = 0
    scalars: tuple[Scalar, ...] = _SCALARS
    base_vars: tuple[str, ...] = ("A", "B")
    attempts: int = 200

    def rng(self, index: int) -> random.Random:
        return random.Random(f"{self.seed}:{index}")

    def sample(self, index: int) -> tuple[Term, Derivation]:
        """The ``index``-th term, reproducible from ``(seed, index)``."""
        rng = self.rng(index)
        for _ in range(self.attempts):
            budget = rng.randint(max(2, self.max_size // 3), self.max_size)
            try:
                t = tidy(self._term(rng, budget, {}, []))
            except _NoTerm:
                continue
            if term_size(erase(t)) > self.max_size:
                continue
            try:
                return t, infer({}, t)
            except TypingError:
                continue
        raise RuntimeError(f"generator found no well-typed term for sample {index}")

    def samples(self, n: int) -> Iterator[tuple[int, Term, Derivation]]:
        for i in range(n):
            t, d = self.sample(i)
            yield i, t, d

    # units and scalars

    def _scalar(self, rng: random.Random) -> Scalar:
        return rng.choice(self.scalars)

    def _unit(self, rng: random.Random, tvars: Sequence[str], depth: int = 0) -> UnitType:
        r = rng.random()
        names = list(tvars) + list(self.base_vars)
        if depth > 1 or r < 0.45:
            return TVar(rng.choice(names))
        if r < 0.6:
            return I_TYPE
        if r < 0.8:
            a = self._unit(rng, tvars, depth + 1)
            if rng.random() < 0.3:
                b = make_tsum([TScale(self._scalar(rng), self._unit(rng, tvars, depth + 1)),
                               TScale(self._scalar(rng), self._unit(rng, tvars, depth + 1))])
            else:
                b = self._unit(rng, tvars, depth + 1)
            return Arrow(a, b)
        x = fresh("Y", set(names))
        return Forall(x, Arrow(TVar(x), TVar(x)))

    # terms

    def _term(self, rng: random.Random, budget: int, env: dict[str, UnitType],
              tvars: list[str]) -> Term:
        if budget <= 2:
            return self._atom(rng, env, tvars)
        kinds = ["abs", "tyabs", "scale", "sum", "sum", "zero", "app", "app", "app"]
        if any(isinstance(u, Forall) for u in env.values()):
            kinds.append("tyapp")
        kind = rng.choice(kinds)
        rest = budget - 1
        if kind == "abs":
            u = self._unit(rng, tvars)
            x = fresh("x", set(env))
            return Abs(x, u, self._term(rng, rest, {**env, x: u}, tvars))
        if kind == "tyabs":
            x = fresh("X", set(tvars) | set(self.base_vars) | context_ftv(env))
            return TyAbs(x, self._term(rng, rest, env, tvars + [x]))
        if kind == "scale":
            return Scale(self._scalar(rng), self._term(rng, rest, env, tvars))
        if kind == "zero":
            return Zero(self._term(rng, rest, env, tvars))
        if kind == "tyapp":
            x = rng.choice([v for v, u in env.items() if isinstance(u, Forall)])
            return TyApp(Var(x), self._unit(rng, tvars))
        if kind == "sum":
            return self._sum(rng, rest, env, tvars)
        return self._app(rng, rest, env, tvars)

    def _atom(self, rng: random.Random, env: dict[str, UnitType], tvars: list[str]) -> Term:
        if env and rng.random() < 0.7:
            return Var(rng.choice(sorted(env)))
        c = rng.choice([ID, TRUE, FALSE])
        if rng.random() < 0.3:
            c = TyApp(c, self._unit(rng, tvars))
        return c

    def _sum(self, rng: random.Random, budget: int, env: dict, tvars: list[str]) -> Term:
        half = max(1, budget // 2)
        r = rng.random()
        if r < 0.35:
            return Sum(self._term(rng, half, env, tvars), self._term(rng, budget - half, env, tvars))
        s = self._term(rng, half, env, tvars)
        a, b = self._scalar(rng), self._scalar(rng)
        if r < 0.5:
            return Sum(s, s)
        if r < 0.65:
            return Sum(Scale(a, s), Scale(b, s))
        if r < 0.75:
            return Sum(Scale(a, s), s)
        if r < 0.9:
            # one polymorphic term at two instances
            x = fresh("X", set(tvars) | set(self.base_vars) | context_ftv(env))
            p = TyAbs(x, self._term(rng, half, env, tvars + [x]))
            return Sum(Scale(a, TyApp(p, self._unit(rng, tvars))),
                       Scale(b, TyApp(p, self._unit(rng, tvars))))
        return Sum(s, Zero(self._term(rng, budget - half, env, tvars)))

    def _app(self, rng: random.Random, budget: int, env: dict, tvars: list[str]) -> Term:
        arg_budget = max(1, budget // 3)
        arg = self._term(rng, arg_budget, env, tvars)
        try:
            aty = infer(env, tidy(arg)).type
        except TypingError:
            raise _NoTerm()
        units = [u for _, u in canon_pairs(aty)]
        body_budget = budget - arg_budget - 1
        r = rng.random()
        if len(units) == 1 and r < 0.35:
            fun = self._lam(rng, units[0], body_budget, env, tvars)
        elif len(units) == 1 and r < 0.45 and any(equiv(u, I_TYPE) for u in env.values()):
            x = rng.choice(sorted(v for v, u in env.items() if equiv(u, I_TYPE)))
            fun = TyApp(Var(x), units[0])
        else:
            x = fresh("X", set(tvars) | set(self.base_vars) | context_ftv(env))
            fun = TyAbs(x, self._lam(rng, TVar(x), body_budget, env, tvars + [x]))
            if r > 0.8:
                g = TyAbs(x, self._lam(rng, TVar(x), 1, env, tvars + [x]))
                fun = Sum(Scale(self._scalar(rng), fun), Scale(self._scalar(rng), g))
            elif r > 0.7:
                fun = Scale(self._scalar(rng), fun)
        return App(fun, arg)

    def _lam(self, rng: random.Random, dom: UnitType, budget: int, env: dict,
             tvars: list[str]) -> Term:
        x = fresh("x", set(env))
        return Abs(x, dom, self._term(rng, max(1, budget), {**env, x: dom}, tvars))


class _NoTerm(Exception):
    pass


# corpus

def prelude_corpus() -> list[tuple[str, Term]]:
    """Closed prelude definitions with their names."""
    prog = prelude()
    return list(prog.defs.items())


def _show_step(step) -> str:
    return step.line(show_term)


# subject reduction

def _evidence(t: Term, path: tuple, first: Term, second: Term) -> list[tuple[Type, Type]]:
    """Typings of one erased term at every ancestor of ``path``: the subterm with
    the redex replaced by each of two annotated copies."""
    out = []
    for k in range(len(path) + 1):
        q, rel = path[:k], path[k:]
        ctx = _ctx_at(t, q, {})
        sub = _get(t, q)
        try:
            a = infer(ctx, tidy(_replace(sub, rel, first))).type
            b = infer(ctx, tidy(_replace(sub, rel, second))).type
        except TypingError:
            continue
        out.append((a, b))
    return out


def _f_copies(step) -> Optional[tuple[tuple, Term, Term]]:
    """``(path of the dropped copy, kept copy, dropped copy)`` for F1-F3 steps."""
    parts = summands(step.redex)
    i, j = step.detail
    si, sj = parts[i], parts[j]
    if step.rule == "F1":
        return step.path + (f"+{j}", "body"), si.body, sj.body
    if step.rule == "F2":
        return step.path + (f"+{j}",), si.body, sj
    return step.path + (f"+{j}",), si, sj


def _audit_step(report: AuditReport, idx: int, t: Term, ty: Type, step) -> None:
    after = step.result
    try:
        ty2 = infer({}, after).type
    except TypingError as exc:
        report.fail("reduct typable", Counterexample(
            idx, show_term(t), _show_step(step), "a typable reduct", f"{type(exc).__name__}: {exc}"))
        return
    report.tally("reduct typable", True)
    if group(step.rule) != "F":
        if report.tally("non-F: type preserved up to equivalence", equiv(ty2, ty)):
            return
        report.counterexamples.append(Counterexample(
            idx, show_term(t), _show_step(step), show_type(ty), show_type(ty2)))
        return
    name = f"F: reduct type below original ({step.rule})"
    if step.rule == "F4":
        ok = order_leq(ty2, ty)
        if report.tally(name, ok):
            return
        report.counterexamples.append(Counterexample(
            idx, show_term(t), _show_step(step), f"S below {show_type(ty)}", show_type(ty2)))
        return
    path, kept, dropped = _f_copies(step)
    ev = _evidence(t, step.path, kept, dropped)
    try:
        below = order_leq(ty2, ty, ev)
    except MissingEvidence:
        below = False
    if not report.tally(name, below):
        report.counterexamples.append(Counterexample(
            idx, show_term(t), _show_step(step), f"S below {show_type(ty)}", show_type(ty2)))
        return
    # the original erased term also has type S: annotate the dropped copy like the kept one
    reannotated = tidy(_replace(t, path, kept))
    try:
        check({}, reannotated, ty2)
        ok = alpha_key(reannotated) == alpha_key(t)
    except TypingError:
        ok = False
    if not report.tally("F: original term has the reduct type", ok):
        report.counterexamples.append(Counterexample(
            idx, show_term(t), _show_step(step), f"original checks at {show_type(ty2)}",
            "no annotation of the original term checks"))


def _audit_term(report: AuditReport, idx: int, t: Term, fuel: int) -> None:
    cur = tidy(t)
    for _ in range(fuel):
        try:
            ty = infer({}, cur).type
        except TypingError:
            return
        steps = one_step(cur)
        if not steps:
            return
        for step in steps:
            _audit_step(report, idx, cur, ty, step)
        cur = steps[0].result


def audit_subject_reduction(corpus: Iterable[tuple[str, Term]] = (), samples: int = 200,
                            fuel: int = 50, seed: int = 0, max_size: int = 14) -> AuditReport:
    """Check every one-step reduct along the reduction path of each term:
    non-F steps keep the type up to equivalence; F steps give a reduct whose
    type ``S`` is below the original in the reduction order, and the original
    term checks at ``S`` too."""
    start = time.perf_counter()
    report = AuditReport("sr", seed, samples)
    for k, (name, t) in enumerate(corpus):
        _audit_term(report, -1 - k, t, fuel)
    gen = TypedTermGenerator(max_size=max_size, seed=seed)
    for i, t, _ in gen.samples(samples):
        _audit_term(report, i, t, fuel)
    report.elapsed = time.perf_counter() - start
    return report


# strong normalization

@dataclass(frozen=True)
class Exploration:
    terminated: bool
    states: int
    depth: int
    cycle: bool


def explore(t: Term, fuel: int = 20_000) -> Exploration:
    """Exhaustive reduction tree of ``t`` modulo AC and alpha: whether every
    path ends, the number of distinct states, and the longest path."""
    t = tidy(t)
    depth: dict[tuple, int] = {}
    active: set[tuple] = set()
    root = ac_key(t)
    stack = [(root, t, None)]
    active.add(root)
    while stack:
        k, cur, it = stack[-1]
        if it is None:
            it = iter(one_step(cur))
            stack[-1] = (k, cur, it)
        advanced = False
        for step in it:
            k2 = ac_key(step.result)
            if k2 in active:
                return Exploration(False, len(depth) + len(active), 0, True)
            if k2 in depth:
                continue
            if len(depth) + len(active) >= fuel:
                return Exploration(False, len(depth) + len(active), 0, False)
            active.add(k2)
            stack.append((k2, step.result, None))
            advanced = True
            break
        if advanced:
            continue
        stack.pop()
        active.discard(k)
        kids = [depth[ac_key(s.result)] for s in one_step(cur)]
        depth[k] = 1 + max(kids) if kids else 0
    return Exploration(True, len(depth), depth[root], False)


def ycomb_control(fuel: int = 300) -> dict[str, object]:
    """The untypable fixpoint-like term: rejected by the checker, and its
    unfolding under the innermost strategy exhausts the fuel."""
    yb = parse_term(r"(\x. b + (x) x) \x. b + (x) x")
    try:
        infer({"b": TVar("B")}, yb)
        rejected = False
    except TypingError:
        rejected = True
    try:
        normalize(yb, fuel)
        exhausted = False
    except FuelExhausted:
        exhausted = True
    return {"rejected by checker": rejected, "exhausts fuel": exhausted}


def audit_strong_normalization(samples: int = 200, fuel: int = 20_000, seed: int = 0,
                               max_size: int = 12,
                               corpus: Iterable[tuple[str, Term]] = ()) -> AuditReport:
    """Explore the full reduction tree of every term and require it to be finite."""
    start = time.perf_counter()
    report = AuditReport("sn", seed, samples)
    deepest, states = 0, 0
    items = [(-1 - k, t) for k, (_, t) in enumerate(corpus)]
    items += [(i, t) for i, t, _ in TypedTermGenerator(max_size=max_size, seed=seed).samples(samples)]
    for idx, t in items:
        ex = explore(t, fuel)
        states = max(states, ex.states)
        if report.tally("reduction tree finite", ex.terminated):
            deepest = max(deepest, ex.depth)
            continue
        why = "a reduction cycle" if ex.cycle else f"more than {fuel} states"
        report.counterexamples.append(Counterexample(
            idx, show_term(t), "exhaustive exploration", "finite reduction tree", why))
    control = ycomb_control()
    report.tally("control: untypable term rejected", bool(control["rejected by checker"]))
    report.tally("control: untypable term exhausts fuel", bool(control["exhausts fuel"]))
    report.stats["max tree depth"] = deepest
    report.stats["max distinct states"] = states
    report.elapsed = time.perf_counter() - start
    return report


# local confluence

def _reachable(t: Term, cap: int) -> Optional[set[tuple]]:
    seen = {ac_key(t)}
    todo = [t]
    while todo:
        for step in one_step(todo.pop()):
            k = ac_key(step.result)
            if k not in seen:
                if len(seen) >= cap:
                    return None
                seen.add(k)
                todo.append(step.result)
    return seen


def audit_local_confluence(samples: int = 200, size_cap: int = 14, fuel: int = 10_000,
                           seed: int = 0, states: int = 12) -> AuditReport:
    """Every peak of one-step reducts joins, at up to ``states`` terms reachable
    from each sample.  A peak that does not join within fuel counts as refuted
    only when both reduction graphs are finite and disjoint; otherwise it is
    reported as inconclusive."""
    start = time.perf_counter()
    report = AuditReport("confluence", seed, samples)
    peaks = 0
    for i, t, _ in TypedTermGenerator(max_size=size_cap, seed=seed).samples(samples):
        seen = {ac_key(t)}
        queue = [t]
        while queue:
            cur = queue.pop(0)
            reducts = list({ac_key(s.result): s for s in one_step(cur)}.values())
            for a in range(len(reducts)):
                for b in range(a + 1, len(reducts)):
                    peaks += 1
                    s1, s2 = reducts[a], reducts[b]
                    if report.tally("peak joins", join(s1.result, s2.result, fuel) is not None):
                        continue
                    r1, r2 = _reachable(s1.result, fuel), _reachable(s2.result, fuel)
                    cx = Counterexample(i, show_term(cur), f"{_show_step(s1)} || {_show_step(s2)}",
                                        "a common reduct", "no join found")
                    if r1 is not None and r2 is not None and not (r1 & r2):
                        report.counterexamples.append(cx)
                    else:
                        report.inconclusive.append(cx)
            for s in reducts:
                k = ac_key(s.result)
                if k not in seen and len(seen) < states:
                    seen.add(k)
                    queue.append(s.result)
    report.stats["peaks"] = peaks
    report.stats["inconclusive rate"] = f"{len(report.inconclusive) / max(1, peaks):.4f}"
    report.elapsed = time.perf_counter() - start
    return report


# typing lemmas

def _descend(d: Derivation, rule: str) -> Optional[Derivation]:
    """The first ``rule`` node below ``d`` through quantifier and equivalence nodes."""
    while d.rule != rule:
        if d.rule not in ("forallI", "forallE", "equiv") or not d.premises:
            return None
        d = d.premises[0]
    return d


def _bound_variant(rng: random.Random, u: UnitType, depth: int = 0) -> UnitType:
    """An equivalent unit type: bound variables renamed, codomains rearranged."""
    if isinstance(u, Forall):
        y = fresh(u.var + "r", type_free_vars(u.body) | {u.var})
        return Forall(y, _bound_variant(rng, subst_type(u.body, u.var, TVar(y)), depth + 1))
    if isinstance(u, Arrow):
        return Arrow(_bound_variant(rng, u.dom, depth + 1), _variant(rng, u.cod, depth + 1))
    return u


def _variant(rng: random.Random, t: Type, depth: int = 0) -> Type:
    """An equivalent type: summands shuffled, coefficients split, units varied."""
    parts = []
    for c, u in canon_pairs(t):
        u = _bound_variant(rng, u, depth)
        if rng.random() < 0.4:
            c1 = rng.choice(_SCALARS)
            parts += [TScale(c1, u), TScale(c - c1, u)]
        elif c.is_one() and rng.random() < 0.5:
            parts.append(u)
        else:
            parts.append(TScale(c, u))
    rng.shuffle(parts)
    out = make_tsum(parts)
    if rng.random() < 0.3:
        a = rng.choice(_SCALARS[:6])
        out = TScale(a, make_tsum(TScale(Scalar.of(1) / a, p) for p in type_summands_of(out)))
    return out


def type_summands_of(t: Type) -> list[Type]:
    from .syntax import type_summands

    return type_summands(t)


def _all_forall(t: Type, x: str) -> Type:
    from .checker import map_units

    return map_units(t, lambda u: Forall(x, u))


def _lemma_checks(report: AuditReport, rng: random.Random, idx: int, t: Term, d: Derivation,
                  other: Type) -> None:
    ty = d.type
    name = show_term(t)

    def record(lemma: str, ok: bool, expected: str, actual: str) -> None:
        if not report.tally(lemma, ok):
            report.counterexamples.append(Counterexample(idx, name, lemma, expected, actual))

    # canonical decomposition
    v = _variant(rng, ty)
    c = canon(v)
    units = c.units()
    distinct = all(not equiv(units[a], units[b]) for a in range(len(units)) for b in range(a + 1, len(units)))
    record("canonical decomposition", distinct and equiv(c.embed(), ty) and equiv(v, ty)
           and canon(c.embed()) == c, show_type(ty), show_type(c.embed()))
    # quantifying every summand
    for r in (v, other):
        x = fresh("Q", type_free_vars(ty) | type_free_vars(r))
        lhs, rhs = equiv(ty, r), equiv(_all_forall(ty, x), _all_forall(r, x))
        record("equivalence under quantification", lhs == rhs,
               f"{lhs}", f"{rhs} for {show_type(r)}")
    # substitution
    for x in sorted(type_free_vars(ty))[:2] or ["A"]:
        w = TypedTermGenerator()._unit(rng, [])
        ok = equiv(subst_type_many(ty, {x: w}), subst_type_many(v, {x: w}))
        record("equivalence under substitution", ok, show_type(ty), show_type(v))
    # scalars
    alpha = rng.choice(_SCALARS)
    da = infer({}, Scale(alpha, t))
    record("scaled terms", equiv(da.type, TScale(alpha, ty)),
           show_type(TScale(alpha, ty)), show_type(da.type))
    d0 = infer({}, Scale(Scalar.of(0), t))
    record("zero-scaled terms", all(k.is_zero() for k in canon(d0.type).coefficients()),
           "all coefficients zero", show_type(d0.type))
    for node in d.nodes():
        if node.rule in ("equiv", "forallE", "forallI") and node.premises and node.premises[0].term is node.term:
            continue
        if is_basis(node.term):
            pairs = canon_pairs(node.type)
            record("basis terms have unit types",
                   len(pairs) == 1 and pairs[0][0].is_one(), "one unit", show_type(node.type))
        if node.rule == "alphaI":
            record("scaled terms",
                   equiv(node.type, TScale(node.term.scalar, node.premises[0].type)),
                   show_type(node.type), show_type(node.premises[0].type))
        if node.ctx:
            ctx2 = {y: _bound_variant(rng, u) for y, u in node.ctx.items()}
            try:
                ok = equiv(infer(ctx2, node.term).type, node.type)
            except TypingError:
                ok = False
            record("equivalent contexts", ok, show_type(node.type), "different type")
        if node.rule == "->I":
            _substitution_check(report, rng, idx, name, node, record)


def _substitution_check(report, rng, idx, name, node: Derivation, record) -> None:
    """Substituting a basis term of an instance of the binder type into the body."""
    lam, body = node.term, node.premises[0]
    if not isinstance(lam, Abs):
        return
    xs = sorted(type_free_vars(lam.ty) - context_ftv(node.ctx))
    sub = {x: TypedTermGenerator()._unit(rng, []) for x in xs}
    inst = subst_type_many(lam.ty, sub)
    z = fresh("z", set(node.ctx) | {lam.var})
    ctx = {**{y: u for y, u in node.ctx.items()}, z: inst}
    reduct = subst_term(subst_term_type(lam.body, sub), lam.var, Var(z))
    expected = subst_type_many(body.type, sub)
    try:
        check(ctx, tidy(reduct), expected)
        ok = True
        actual = "checks"
    except TypingError as exc:
        ok, actual = False, f"{type(exc).__name__}: {exc}"
    record("substitution of basis terms", ok, show_type(expected), actual)


def _generation_checks(report: AuditReport, idx: int, t: Term, d: Derivation) -> None:
    name = show_term(t)

    def record(lemma: str, ok: bool, expected: str, actual: str) -> None:
        if not report.tally(lemma, ok):
            report.counterexamples.append(Counterexample(idx, name, lemma, expected, actual))

    for node in d.nodes():
        held = context_ftv(node.ctx)
        app = _descend(node, "->E")
        if app is not None and node.rule in ("->E", "forallI"):
            fun, arg = app.premises
            p = app.payload
            fshape = embed([(c, _forall(p["prefix"], Arrow(p["domain"], cod))) for c, cod in p["cods"]])
            matches = all(equiv(subst_type_many(p["domain"], w), v)
                          for w, (_, v) in zip(p["subs"], p["args"]))
            result = _app_type(p["cods"], p["args"], p["subs"])
            ok = (equiv(fun.type, fshape) and equiv(arg.type, embed(p["args"])) and matches
                  and preceq(result, node.type, held=held))
            record("inversion: application", ok, show_type(node.type), show_type(result))
        lam = _descend(node, "->I")
        if lam is not None and node.rule in ("->I", "forallI"):
            arrow = Arrow(lam.term.ty, lam.premises[0].type)
            record("inversion: abstraction", preceq(arrow, node.type, held=held),
                   show_type(node.type), show_type(arrow))
        plus = _descend(node, "+I")
        if plus is not None and node.rule in ("+I", "forallI"):
            total = TSum(plus.premises[0].type, plus.premises[1].type)
            record("inversion: linear combinations", preceq(total, node.type, held=held),
                   show_type(node.type), show_type(total))


def audit_generation_lemmas(samples: int = 200, seed: int = 0, max_size: int = 14) -> AuditReport:
    """The premises recorded in every application, abstraction and sum node
    witness the corresponding inversion property."""
    start = time.perf_counter()
    report = AuditReport("genlemmas", seed, samples)
    for i, t, d in TypedTermGenerator(max_size=max_size, seed=seed).samples(samples):
        _generation_checks(report, i, t, d)
    report.elapsed = time.perf_counter() - start
    return report


def audit_lemmas(samples: int = 200, seed: int = 0, max_size: int = 14) -> AuditReport:
    """Lemma-level properties of types and derivations, including the inversion lemmas."""
    start = time.perf_counter()
    report = AuditReport("lemmas", seed, samples)
    gen = TypedTermGenerator(max_size=max_size, seed=seed)
    items = list(gen.samples(samples))
    for i, t, d in items:
        rng = random.Random(f"lemmas:{seed}:{i}")
        other = items[(i + 1) % len(items)][2].type
        _lemma_checks(report, rng, i, t, d, other)
        _generation_checks(report, i, t, d)
    report.elapsed = time.perf_counter() - start
    return report


AUDITS: dict[str, Callable[..., AuditReport]] = {
    "sr": lambda samples, seed, fuel: audit_subject_reduction(prelude_corpus(), samples, min(fuel, 50), seed),
    "confluence": lambda samples, seed, fuel: audit_local_confluence(samples, 14, min(fuel, 10_000), seed),
    "sn": lambda samples, seed, fuel: audit_strong_normalization(samples, min(fuel, 20_000), seed,
                                                                 corpus=prelude_corpus()),
    "genlemmas": lambda samples, seed, fuel: audit_generation_lemmas(samples, seed),
    "lemmas": lambda samples, seed, fuel: audit_lemmas(samples, seed),
}


def run_audit(kind: str, samples: int = 200, seed: int = 0, fuel: int = 100_000) -> AuditReport:
    if kind not in AUDITS:
        raise ValueError(f"unknown audit {kind!r}; choose from {', '.join(AUDITS)}")
    return AUDITS[kind](samples, seed, fuel)
