"""End-to-end acceptance criteria.

Each test prints one ``PASS``/``FAIL`` line with its measured counts and
time; the lines are repeated in the terminal summary.
"""

import itertools
import time

import numpy as np
import pytest

from cfc import harness
from cfc.cli import main as cli_main
from cfc.harness import gen_program, gen_world, run_suite
from cfc.parser import parse_program, parse_type
from cfc.printer import show_program
from cfc.program import Pred, program_alpha_eq
from cfc.rewrite import Rewriter
from cfc.syntax import TyCon, TyVar, subst_types
from cfc.unify import is_idempotent, is_unifier, unify

from .conftest import CORPUS, corpus, ty

RESULTS: list = []

N_WORLDS = 100


def report(n: int, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  criterion {n}: {detail}"
    RESULTS.append(line)
    print(line)


@pytest.fixture(scope="module")
def worlds():
    start = time.perf_counter()
    ws = [gen_world(1000 + i, 3, n_exprs=100) for i in range(N_WORLDS)]
    print(f"generated {len(ws)} worlds in {time.perf_counter() - start:.1f}s")
    return ws


def run_over(worlds, suite: str, total: int):
    """Split ``total`` cases across the worlds and merge the reports."""
    merged = harness.SuiteReport(suite)
    per = [total // len(worlds) + (1 if i < total % len(worlds) else 0)
           for i in range(len(worlds))]
    start = time.perf_counter()
    for w, n in zip(worlds, per):
        merged.merge(run_suite(suite, w, n))
    return merged, time.perf_counter() - start


def test_1_corpus_regressions():
    start = time.perf_counter()
    equ, plus, onlyint = corpus("equ.cfc"), corpus("plus.cfc"), corpus("onlyint.cfc")
    checks = {
        "Equ Int Bool": Rewriter(equ.sig).normal_form(ty("Equ Int Bool")) == ty("False"),
        "Equ Int Int": Rewriter(equ.sig).normal_form(ty("Equ Int Int")) == ty("True"),
        "Plus": Rewriter(plus.sig).normal_form(ty("Plus (S (S Z)) (S Z)")) == ty("S (S (S Z))"),
        "OnlyInt stuck": Rewriter(onlyint.sig).normal_form(ty("OnlyInt Bool")) == ty("OnlyInt Bool"),
        "Loop rejected": [d.code for d in corpus("loop_bad.cfc").diagnostics] == ["FamilyInRHS"],
        "Loopy accepted": corpus("loopy.cfc").ok,
        "Collects": corpus("collects.cfc").env.infer_constraints(
            ["c"], parse_type("Elem c -> c -> c", ("Elem",)))
        == (Pred("Collects", (TyVar("c"),)),),
    }
    # The same answers through the command line.
    import io
    out = io.StringIO()
    checks["cli normalize"] = (cli_main(["normalize", str(CORPUS / "equ.cfc"), "--type",
                                         "Equ Int Bool"], stdout=out) == 0
                               and out.getvalue().strip() == "False")
    elapsed = time.perf_counter() - start
    failed = [k for k, v in checks.items() if not v]
    ok = not failed and elapsed < 5
    report(1, ok, f"{len(checks) - len(failed)}/{len(checks)} corpus checks in {elapsed:.2f}s"
           + (f"; failed: {', '.join(failed)}" if failed else ""))
    assert ok


def test_2_preservation(worlds):
    r, t = run_over(worlds, "preservation", 10_000)
    ok = r.ok and r.cases >= 10_000 and t < 120
    report(2, ok, f"{r.passed}/{r.cases} expressions over {len(worlds)} signatures, "
           f"{r.stats.get('steps', 0)} steps, {r.failed} failures, {t:.1f}s")
    assert ok, r.counterexamples


def test_3_progress(worlds):
    r, t = run_over(worlds, "progress", 10_000)
    ok = r.ok and r.cases >= 10_000 and t < 120
    report(3, ok, f"{r.passed}/{r.cases} expressions, {r.stats.get('fuel_exhausted', 0)} out of "
           f"fuel, {r.failed} stuck, {t:.1f}s")
    assert ok, r.counterexamples


def test_4_measure(worlds):
    r, t = run_over(worlds, "measure", 50_000)
    ok = r.ok and r.cases >= 50_000 and t < 60
    report(4, ok, f"{r.cases} reduction steps, {r.failed} violations, "
           f"{r.stats.get('chains_normalized', 0)} chains normalized, {t:.1f}s")
    assert ok, r.counterexamples


def test_5_local_confluence(worlds):
    peaks, t1 = run_over(worlds, "local_confluence", 5_000)
    strat, t2 = run_over(worlds, "strategy", 10_000)
    ok = (peaks.ok and strat.ok and peaks.cases >= 5_000 and strat.cases >= 10_000
          and t1 + t2 < 120)
    report(5, ok, f"{peaks.passed}/{peaks.cases} peaks join; {strat.passed}/{strat.cases} types "
           f"agree under 3 strategies; {t1 + t2:.1f}s")
    assert ok, peaks.counterexamples + strat.counterexamples


def test_6_consistency(worlds):
    r, t = run_over(worlds, "consistency", 5_000)
    ok = r.ok and r.cases >= 5_000
    report(6, ok, f"{r.passed}/{r.cases} coercions join, "
           f"{r.stats.get('proper_endpoints', 0)} with proper endpoints, {t:.1f}s")
    assert ok, r.counterexamples


def test_7_apart_stability(worlds):
    r, t = run_over(worlds, "apart_stability", 10_000)
    ok = r.ok and r.cases >= 10_000
    report(7, ok, f"{r.passed}/{r.cases} apart triples stay apart, {t:.1f}s")
    assert ok, r.counterexamples


# -- criterion 8: unification against brute force ------------------------------------

A = TyCon("A")
VARS = ("x", "y")


def _open_types(depth: int) -> list:
    """Every type over A, binary P and the variables with depth <= ``depth``."""
    level = [A] + [TyVar(v) for v in VARS]
    out = list(level)
    for _ in range(depth - 1):
        out = [A] + [TyVar(v) for v in VARS] + [TyCon("P", (a, b)) for a in out for b in out]
    return out


def _ground_types(depth: int) -> list:
    out = [A]
    for _ in range(depth - 1):
        out = [A] + [TyCon("P", (a, b)) for a in out for b in out]
    return out


class _Interner:
    def __init__(self):
        self.ids: dict = {}

    def pair(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        ids = self.ids
        return np.fromiter((ids.setdefault(k, len(ids) + 1) for k in zip(a.tolist(), b.tolist())),
                           dtype=np.int64, count=len(a))


def _brute_unifiable(types: list, sub_depth: int) -> np.ndarray:
    """``M[i, j]`` is true iff some ground substitution of depth <= ``sub_depth``
    makes ``types[i]`` and ``types[j]`` equal."""
    intern = _Interner()

    def evaluate(t, cols: dict, width: int, memo: dict) -> np.ndarray:
        if t not in memo:
            if isinstance(t, TyVar):
                memo[t] = cols[t.name]
            elif not t.args:
                memo[t] = np.zeros(width, dtype=np.int64)
            else:
                memo[t] = intern.pair(evaluate(t.args[0], cols, width, memo),
                                      evaluate(t.args[1], cols, width, memo))
        return memo[t]

    ground = _ground_types(sub_depth)
    gid = {g: int(evaluate(g, {}, 1, {})[0]) for g in ground}
    thetas = list(itertools.product(ground, repeat=len(VARS)))
    cols = {v: np.array([gid[th[k]] for th in thetas], dtype=np.int64)
            for k, v in enumerate(VARS)}
    memo: dict = {}
    vals = np.stack([evaluate(t, cols, len(thetas), memo) for t in types])
    return np.stack([(vals[i] == vals).any(axis=1) for i in range(len(types))])


def _depth(t) -> int:
    return 1 + max((_depth(a) for a in getattr(t, "args", ())), default=0)


def _unify_matrix(types: list):
    n = len(types)
    succ = np.zeros((n, n), dtype=bool)
    bad = []
    for i, s in enumerate(types):
        for j, t in enumerate(types):
            th = unify([s], [t])
            if th is not None:
                succ[i, j] = True
                if not (is_unifier(th, [s], [t]) and is_idempotent(th)):
                    bad.append((s, t, th))
    return succ, bad


@pytest.fixture(scope="module")
def unif_space():
    start = time.perf_counter()
    types = _open_types(3)
    succ, bad = _unify_matrix(types)
    return types, succ, bad, time.perf_counter() - start


def test_8_unification_oracle_depth4(unif_space):
    """Oracle substitutions range over ground types of depth <= 4.

    That bound is enough: grounding every returned unifier with ``A`` gives a
    ground unifier, and those never exceed depth 3 on this space (checked
    below), so the oracle cannot miss a unifiable pair.
    """
    types, succ, bad, t0 = unif_space
    start = time.perf_counter()
    deepest = max(_depth(subst_types({v: A for v in VARS}, b))
                  for s in types for t in types
                  if (th := unify([s], [t])) is not None for b in th.tys.values())
    assert deepest <= 4
    oracle = _brute_unifiable(types, 4)
    elapsed = t0 + time.perf_counter() - start
    diff = int((succ != oracle).sum())
    ok = diff == 0 and not bad and elapsed < 60
    report(8, ok, f"{len(types) ** 2} pairs, oracle substitution depth 4: {diff} discrepancies, "
           f"{len(bad)} non-idempotent or wrong unifiers, {elapsed:.1f}s")
    assert ok


@pytest.mark.xfail(strict=True, reason="depth-2 substitutions cannot unify a variable with a "
                   "depth-3 type, so the oracle under-approximates; see the decisions ledger")
def test_8_unification_oracle_depth2_as_stated(unif_space):
    types, succ, bad, _ = unif_space
    oracle = _brute_unifiable(types, 2)
    diff = succ != oracle
    # Every discrepancy is a pair the oracle misses; unify never over-approximates.
    assert not (oracle & ~succ).any()
    x, deep = TyVar("x"), TyCon("P", (TyCon("P", (A, A)), A))
    i, j = types.index(x), types.index(deep)
    assert succ[i, j] and not oracle[i, j]
    report(8, False, f"as stated (oracle substitution depth 2): {int(diff.sum())} discrepancies, "
           f"all pairs the oracle cannot reach, e.g. x ~ P (P A A) A")
    assert not diff.any()


def test_9_totality_link(worlds):
    r, t = run_over(worlds, "totality_link", 0)
    fams = sum(len(w.total_families) for w in worlds)
    ok = r.ok and r.cases > 0
    report(9, ok, f"{fams} total families in {len(worlds)} worlds, {r.passed}/{r.cases} "
           f"argument tuples reduce with re-checked proofs, {t:.1f}s")
    assert ok, r.counterexamples


def test_10_round_trip():
    start = time.perf_counter()
    failures = []
    files = sorted(CORPUS.glob("*.cfc"))
    for path in files:
        prog = parse_program(path.read_text(), str(path))
        if not program_alpha_eq(prog, parse_program(show_program(prog))):
            failures.append(path.name)
    for seed in range(1000):
        prog = gen_program(seed)
        if not program_alpha_eq(prog, parse_program(show_program(prog))):
            failures.append(f"program {seed}")
    ok = not failures
    report(10, ok, f"{len(files)} corpus files and 1000 generated programs, "
           f"{len(failures)} mismatches, {time.perf_counter() - start:.1f}s")
    assert ok, failures[:5]
