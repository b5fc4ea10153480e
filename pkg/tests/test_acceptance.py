"""Acceptance criteria, one test each.

Every test prints ``CRITERION n PASS|FAIL`` with its measured time and
pinned limit.  Run with ``pytest tests/test_acceptance.py -s`` or directly
as ``python tests/test_acceptance.py``.
"""
from __future__ import annotations

import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import pytest  # noqa: E402

from cocalc.bisim import RationalHandle, bisim_rational, bisim_to_depth, pretty  # noqa: E402
from cocalc.coterm import Con, Var, embed, truncate  # noqa: E402
from cocalc.eqparse import parse_equations  # noqa: E402
from cocalc.inhabit import (enumerate_inhabitants, forest_signature, generate_search_forest,  # noqa: E402
                            oracle_enumerate, parse_type)
from cocalc.laws import check_monad_laws  # noqa: E402
from cocalc.randgen import (random_context, random_finterm, random_sort, random_substitution,  # noqa: E402
                            random_system)
from cocalc.signature import builtin_signature, parse_signature  # noqa: E402
from cocalc.subst import Substitution, bind, bind_via_solve, fin_bind  # noqa: E402
from cocalc.system import interpret, solve  # noqa: E402

from conftest import DATA, GOLDEN, SIG_NAMES, rng_for  # noqa: E402

# pinned tolerances
LAW_TRIALS, LAW_DEPTH, LAW_SEED, LAW_LIMIT_S = 200, 8, 42, 30.0
SYSTEMS_PER_SIG, PLUG_DEPTH, SYSTEMS_LIMIT_S = 100, 64, 30.0
SOLVE_PAIRS, SOLVE_DEPTH, SOLVE_LIMIT_S = 200, 64, 60.0
FIN_TERMS, FIN_LIMIT_S = 200, 30.0
CHURCH_DEPTH, CHURCH_FUEL, CHURCH_LIMIT_S = 64, 8, 10.0
THREE_FUEL, THREE_LIMIT_S = 13, 10.0
INVARIANT_CASES, INVARIANT_LIMIT_S = 1000, 60.0
GOLDEN_LIMIT_S = 10.0


def report(n: int, ok: bool, elapsed: float, limit: float, detail: str) -> str:
    status = "PASS" if ok and elapsed < limit else "FAIL"
    return f"CRITERION {n} {status} time={elapsed:.2f}s limit={limit:.0f}s {detail}"


class _Printer:
    def __init__(self, capsys=None):
        self.capsys = capsys

    def __call__(self, line: str) -> None:
        if self.capsys is None:
            print(line)
        else:
            with self.capsys.disabled():
                print("\n" + line)


@pytest.fixture
def emit(capsys):
    return _Printer(capsys)


def _check(emit, n, ok, elapsed, limit, detail):
    emit(report(n, ok, elapsed, limit, detail))
    assert ok, detail
    assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"


# ---- 1: monad laws

def test_criterion_1_laws(emit):
    parts, ok, worst = [], True, 0.0
    for name in SIG_NAMES:
        t0 = time.perf_counter()
        rep = check_monad_laws(builtin_signature(name, ("0",)), seed=LAW_SEED, trials=LAW_TRIALS, depth=LAW_DEPTH)
        dt = time.perf_counter() - t0
        worst = max(worst, dt)
        ok &= rep.failures == 0
        parts.append(f"{name}:failures={rep.failures}:{dt:.2f}s")
    _check(emit, 1, ok, worst, LAW_LIMIT_S, " ".join(parts))


# ---- 2: plug-in property and cycle encodings

def test_criterion_2_systems(emit):
    t0 = time.perf_counter()
    bad = 0
    for k, name in enumerate(SIG_NAMES):
        sig = builtin_signature(name)
        rng = rng_for(1000 + k)
        for _ in range(SYSTEMS_PER_SIG):
            ctx = random_context(sig, rng)
            es, _ = random_system(sig, rng, ctx, random_sort(sig, rng, ctx))
            sols = solve(es)
            for u, (uctx, sort) in es.decls.items():
                if not bisim_to_depth(sols[u], interpret(es, es.rhs[u], sols, uctx, sort), PLUG_DEPTH):
                    bad += 1
    unary = parse_signature((DATA / "unary.sig").read_text())
    one = parse_equations((DATA / "cycle1.eq").read_text(), unary)
    two = parse_equations((DATA / "cycle2.eq").read_text(), unary)
    cyc = bisim_rational(RationalHandle.solve(one.system, "X"), RationalHandle.solve(two.system, "A"))
    dt = time.perf_counter() - t0
    _check(emit, 2, bad == 0 and cyc.equal, dt, SYSTEMS_LIMIT_S,
           f"systems={SYSTEMS_PER_SIG * len(SIG_NAMES)} plug_in_failures={bad} cycles_equal={cyc.equal}")


# ---- 3: bind vs bind_via_solve

def test_criterion_3_bind_via_solve(emit):
    sig = builtin_signature("stlc")
    rng = rng_for(3000)
    t0 = time.perf_counter()
    bad = 0
    for _ in range(SOLVE_PAIRS):
        gamma = random_context(sig, rng)
        delta = random_context(sig, rng, include=gamma)
        es, root = random_system(sig, rng, gamma, random_sort(sig, rng, gamma))
        t = solve(es)[root]
        sigma = random_substitution(sig, rng, gamma, delta)
        if not bisim_to_depth(bind(sigma, t), bind_via_solve(sigma, t), SOLVE_DEPTH):
            bad += 1
    dt = time.perf_counter() - t0
    _check(emit, 3, bad == 0, dt, SOLVE_LIMIT_S, f"pairs={SOLVE_PAIRS} depth={SOLVE_DEPTH} mismatches={bad}")


# ---- 4: finite oracle

def _plain(ft):
    if isinstance(ft.node, Var):
        return ft.node
    return Con(ft.node.op, tuple(_plain(a) for a in ft.node.args))


def test_criterion_4_finite_oracle(emit):
    rng = rng_for(4000)
    t0 = time.perf_counter()
    done = bad = 0
    while done < FIN_TERMS:
        sig = builtin_signature(SIG_NAMES[done % len(SIG_NAMES)])
        gamma = random_context(sig, rng)
        delta = random_context(sig, rng, include=gamma)
        try:
            ft = random_finterm(sig, rng, gamma, random_sort(sig, rng, gamma))
            assign = []
            for s in gamma:
                if sig.var_only(s):
                    j = rng.choice([j for j, q in enumerate(delta) if q == s])
                    assign.append(type(ft)(sig, delta, s, Var(j)))
                else:
                    assign.append(random_finterm(sig, rng, delta, s))
        except RuntimeError:  # uninhabited draw
            continue
        expect = fin_bind(assign, delta, ft)
        got = bind(Substitution(gamma, delta, tuple(embed(a) for a in assign), sig), embed(ft))
        if truncate(got, expect.height() + 1) != _plain(expect):
            bad += 1
        done += 1
    dt = time.perf_counter() - t0
    _check(emit, 4, bad == 0, dt, FIN_LIMIT_S, f"terms={FIN_TERMS} mismatches={bad}")


# ---- 5: Church forest and numerals

def _render(terms):
    return [pretty(embed(t), t.height() + 1, "debruijn") for t in terms]


def test_criterion_5_church(emit):
    from test_inhabit import church_numeral

    t0 = time.perf_counter()
    church = parse_type("(0->0)->0->0")
    hand = parse_equations((DATA / "church_forest.eq").read_text(), forest_signature(("0",)))
    same = bisim_to_depth(generate_search_forest([], church), solve(hand.system)["F"], CHURCH_DEPTH)
    got = enumerate_inhabitants([], church, CHURCH_FUEL)
    match = _render(got) == _render(oracle_enumerate([], church, CHURCH_FUEL))
    numerals = sorted(church_numeral(t) for t in got)
    dt = time.perf_counter() - t0
    _check(emit, 5, same and match and None not in numerals, dt, CHURCH_LIMIT_S,
           f"forest_bisim_depth{CHURCH_DEPTH}={same} oracle_match={match} numerals={numerals}")


# ---- 6: THREE

def test_criterion_6_three(emit):
    from test_inhabit import three_shape

    t0 = time.perf_counter()
    three = parse_type("((0->0)->0)->0")
    got = enumerate_inhabitants([], three, THREE_FUEL)
    match = _render(got) == _render(oracle_enumerate([], three, THREE_FUEL))
    shapes = [three_shape(t) for t in got]
    dt = time.perf_counter() - t0
    _check(emit, 6, match and bool(shapes) and None not in shapes, dt, THREE_LIMIT_S,
           f"fuel={THREE_FUEL} members={len(got)} oracle_match={match} shapes={sorted(s for s in shapes if s)}")


# ---- 7: invariant suite

def test_criterion_7_invariants(emit):
    import test_invariants as inv

    inv.CASES.clear()
    t0 = time.perf_counter()
    failed = []
    for prop in inv.PROPERTIES:
        try:
            prop()
        except Exception as e:  # a falsified property
            failed.append(f"{prop.__name__}: {type(e).__name__}")
    dt = time.perf_counter() - t0
    total = sum(inv.CASES.values())
    _check(emit, 7, not failed and total >= INVARIANT_CASES, dt, INVARIANT_LIMIT_S,
           f"cases={total} properties={len(inv.PROPERTIES)} failed={failed or 0}")


# ---- 8: goldens

def test_criterion_8_goldens(emit):
    sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "scripts"))
    from make_golden import goldens

    t0 = time.perf_counter()
    wanted = ("church_infinite_depth4.txt", "church2_depth4.txt")
    first, second = goldens(), goldens()
    ok = all((first[n] + "\n").encode("utf-8") == (GOLDEN / n).read_bytes() and first[n] == second[n]
             for n in wanted)
    dt = time.perf_counter() - t0
    _check(emit, 8, ok, dt, GOLDEN_LIMIT_S, "files=" + ",".join(wanted))


if __name__ == "__main__":
    out = _Printer()
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn(out)
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
