"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

from __future__ import annotations

import random
import time
from fractions import Fraction
from pathlib import Path

import sympy

from lambdavec.audit import (
    audit_lemmas, audit_local_confluence, audit_strong_normalization, audit_subject_reduction,
    prelude_corpus,
)
from lambdavec.checker import infer
from lambdavec.cli import main
from lambdavec.encodings import FALSE, TRUE, apply_encoded, encode_if, encode_matrix, prelude
from lambdavec.parse import parse_program, parse_type
from lambdavec.rewrite import ac_key, normalize
from lambdavec.scalar import HALF_SQRT2, Scalar
from lambdavec.syntax import Scale, Sum, TVar, Var
from lambdavec.typesys import equiv, order_leq
from oracle import to_sympy

SAMPLES = Path(__file__).resolve().parent.parent / "samples"

# pinned limits
HADAMARD_SECONDS = 1.0
MATRIX_SECONDS = 60.0
SR_SECONDS = 5 * 60.0
CONFLUENCE_SECONDS = 10 * 60.0
SN_SECONDS = 10 * 60.0
MAX_INCONCLUSIVE_RATE = 0.01


def verdict(n: int, name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, detail


def cli(capsys, *argv) -> tuple[int, str]:
    code = main([str(a) for a in argv])
    return code, capsys.readouterr().out.strip()


def gaussian(rng: random.Random) -> Scalar:
    re = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    im = Fraction(rng.randint(-4, 4), rng.randint(1, 3)) if rng.random() < 0.5 else 0
    return Scalar(re, 0, im)


def test_01_hadamard_on_true(capsys):
    start = time.perf_counter()
    code1, nf = cli(capsys, "reduce", SAMPLES / "hadamard.lvec", "h_true", "--no-f")
    code2, ty = cli(capsys, "check", SAMPLES / "hadamard.lvec", "h_true")
    elapsed = time.perf_counter() - start
    ok = (code1 == code2 == 0 and nf == "sqrt2/2 . true + sqrt2/2 . false"
          and ty == "h_true : sqrt2/2 . TT + sqrt2/2 . FF" and elapsed < HADAMARD_SECONDS)
    verdict(1, "Hadamard on true", ok, f"{nf!r}; {ty!r}; {elapsed:.3f}s < {HADAMARD_SECONDS}s")


def test_02_hadamard_on_plus_state(capsys):
    code, nf = cli(capsys, "reduce", SAMPLES / "hadamard.lvec", "h_plus")
    prog = prelude()
    ty = infer({}, prog.defs["Hplus"]).type
    tt = parse_type("TT", prog)
    want = parse_type("TT + 0 . FF", prog)
    ok = code == 0 and nf == "true" and equiv(ty, want) and order_leq(tt, want)
    verdict(2, "Hadamard on the plus state", ok, f"normal form {nf!r}, TT below TT + 0 . FF")


def test_03_projections_of_pairs(capsys):
    prog = parse_program((SAMPLES / "pairs.lvec").read_text(), prelude())
    ty = infer(prog.assumptions, prog.defs["proj"]).type
    want_ty = parse_type("U + U' + V + V'")
    code, nf = cli(capsys, "reduce", SAMPLES / "pairs.lvec", "proj")
    nf_term = normalize(prog.defs["proj"], ctx=prog.assumptions).final
    want_nf = Sum(Sum(Var("b"), Var("c")), Sum(Var("b'"), Var("c'")))
    ok = code == 0 and equiv(ty, want_ty) and ac_key(nf_term) == ac_key(want_nf)
    verdict(3, "projections of a sum of pairs", ok, f"normal form {nf!r}")


def test_04_linear_conditional():
    rng = random.Random(4)
    ctx = {"s": TVar("S"), "t": TVar("T")}
    failures = 0
    for _ in range(20):
        alpha, beta = gaussian(rng), rng.choice([gaussian(rng), HALF_SQRT2])
        r = Sum(Scale(alpha, TRUE), Scale(beta, FALSE))
        term = encode_if(r, Var("s"), Var("t"), ctx)
        infer(ctx, term)
        got = normalize(term, ctx=ctx).final
        want = normalize(Sum(Scale(alpha, Var("s")), Scale(beta, Var("t")))).final
        failures += ac_key(got) != ac_key(want)
    verdict(4, "linear conditional", failures == 0, f"{20 - failures}/20 scalar pairs exact")


def test_05_matrix_oracle():
    rng = random.Random(5)
    start = time.perf_counter()
    mismatches = 0
    for _ in range(50):
        n = rng.choice((2, 3))
        entries = [[gaussian(rng) for _ in range(n)] for _ in range(n)]
        v = [gaussian(rng) for _ in range(n)]
        got = apply_encoded(encode_matrix(n, entries), v)
        oracle = sympy.Matrix([[to_sympy(e) for e in row] for row in entries]) * \
            sympy.Matrix([to_sympy(x) for x in v])
        mismatches += any(sympy.simplify(to_sympy(g) - w) != 0 for g, w in zip(got, oracle))
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < MATRIX_SECONDS
    verdict(5, "matrix oracle", ok, f"{50 - mismatches}/50 exact, {elapsed:.1f}s < {MATRIX_SECONDS:.0f}s")


def test_06_subject_reduction():
    report = audit_subject_reduction(prelude_corpus(), samples=300, max_size=14)
    ok = report.ok and report.elapsed < SR_SECONDS
    verdict(6, "weak subject reduction", ok,
            f"{len(report.counterexamples)} counterexamples, {report.elapsed:.1f}s < {SR_SECONDS:.0f}s")


def test_07_local_confluence():
    report = audit_local_confluence(samples=200, size_cap=14, fuel=10_000)
    peaks = report.stats["peaks"]
    rate = len(report.inconclusive) / max(1, peaks)
    ok = report.ok and rate <= MAX_INCONCLUSIVE_RATE and report.elapsed < CONFLUENCE_SECONDS
    verdict(7, "local confluence", ok,
            f"{peaks} peaks, {len(report.counterexamples)} refuted, inconclusive {rate:.2%}, "
            f"{report.elapsed:.1f}s < {CONFLUENCE_SECONDS:.0f}s")


def test_08_strong_normalization():
    report = audit_strong_normalization(samples=200, max_size=12, corpus=prelude_corpus())
    control = all(report.checks[k][0] == 1 and report.checks[k][1] == 0
                  for k in ("control: untypable term rejected", "control: untypable term exhausts fuel"))
    ok = report.ok and control and report.elapsed < SN_SECONDS
    verdict(8, "strong normalization", ok,
            f"{len(report.counterexamples)} non-terminating, control {'ok' if control else 'failed'}, "
            f"max depth {report.stats['max tree depth']}, {report.elapsed:.1f}s < {SN_SECONDS:.0f}s")


def test_09_scalar_field_axioms():
    rng = random.Random(9)

    def rand() -> Scalar:
        return Scalar(*(Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(4)))

    zero, one = Scalar.of(0), Scalar.of(1)
    failures = 0
    for _ in range(10_000):
        x, y, z = rand(), rand(), rand()
        ok = ((x + y) + z == x + (y + z) and x + y == y + x and x + zero == x and x + (-x) == zero
              and (x * y) * z == x * (y * z) and x * y == y * x and x * one == x
              and x * (y + z) == x * y + x * z)
        if not x.is_zero():
            ok = ok and x * x.inverse() == one
        failures += not ok
    verdict(9, "scalar field axioms", failures == 0, f"{10_000 - failures}/10000 triples")


def test_10_lemma_checks():
    report = audit_lemmas(samples=200)
    counts = ", ".join(f"{k} {p}" for k, (p, _) in sorted(report.checks.items()))
    verdict(10, "typing lemma checks", report.ok,
            f"{len(report.counterexamples)} counterexamples; passed: {counts}")
