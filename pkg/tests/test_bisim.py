import pytest
from hypothesis import given, strategies as st

from cocalc.bisim import (ProvenanceError, RationalHandle, bisim_rational, bisim_to_depth, first_difference,
                          pretty, pretty_tree)
from cocalc.coterm import CUT, Con, ContextMorphism, Var, embed, fcon, fvar, truncate, var
from cocalc.randgen import random_context, random_rational, random_sort, random_system
from cocalc.signature import Arrow, FiniteSignature, Arity, Op, arg, builtin_signature, parse_sort
from cocalc.subst import Substitution, bind_via_solve
from cocalc.system import EquationSystem, PCon, PEmbed, PVar, ref, solve

from conftest import SIG_NAMES, agree, rng_for

STLC = builtin_signature("stlc")
F = parse_sort("0->0")
APP = Op("app", ("0", "0"))
LAM_X = Op("lam", ("0", "0"))
LAM_F = Op("lam", (F, Arrow("0", "0")))
UNARY = FiniteSignature(["a"], {"c": Arity((arg("a"),), "a"), "z": Arity((), "a")})
C = Op("c")


def church_system():
    body = ("0", F)
    return EquationSystem(STLC, {"S": (body, "0"), "C": ((), Arrow(F, Arrow("0", "0")))},
                          {"S": PCon(APP, (PVar(1), ref("S", body))),
                           "C": PCon(LAM_F, (PCon(LAM_X, (ref("S", body),)),))})


def church_fin(n):
    ctx = ("0", F)
    body = fvar(STLC, ctx, 0)
    for _ in range(n):
        body = fcon(STLC, APP, [fvar(STLC, ctx, 1), body])
    return fcon(STLC, LAM_F, [fcon(STLC, LAM_X, [body])])


def cycles():
    two = EquationSystem(UNARY, {"A": ((), "a"), "B": ((), "a")},
                         {"A": PCon(C, (ref("B", ()),)), "B": PCon(C, (ref("A", ()),))})
    one = EquationSystem(UNARY, {"X": ((), "a")}, {"X": PCon(C, (PCon(C, (ref("X", ()),)),))})
    return RationalHandle.solve(two, "A"), RationalHandle.solve(one, "X")


def _rationals(name, seed, n):
    sig = builtin_signature(name)
    rng = rng_for(seed)
    for _ in range(n):
        ctx = random_context(sig, rng)
        yield sig, rng, ctx, random_rational(sig, rng, ctx, random_sort(sig, rng, ctx))


# ---- bounded

def test_depth_zero_is_vacuous_when_sorts_agree():
    ctx = ("0", "0")
    assert bisim_to_depth(var(STLC, ctx, 0), var(STLC, ctx, 1), 0)


def test_distinct_variables_differ_at_depth_one():
    ctx = ("0", "0")
    assert not bisim_to_depth(var(STLC, ctx, 0), var(STLC, ctx, 1), 1)
    assert first_difference(var(STLC, ctx, 0), var(STLC, ctx, 1), 10) == 1


def test_context_or_sort_mismatch():
    assert not bisim_to_depth(var(STLC, ("0",), 0), var(STLC, ("0", "0"), 0), 0)
    assert not bisim_to_depth(var(STLC, ("0", F), 0), var(STLC, ("0", F), 1), 0)


def test_infinite_vs_finite_church():
    inf = solve(church_system())["C"]
    fin = embed(church_fin(5))
    # the finite numeral ends in x where the infinite one has a sixth f
    assert bisim_to_depth(inf, fin, 7)
    assert not bisim_to_depth(inf, fin, 8)
    assert first_difference(inf, fin, 64) == 8


def test_infinite_church_equals_itself_deep():
    a, b = solve(church_system())["C"], solve(church_system())["C"]
    assert bisim_to_depth(a, b, 10_000)


@pytest.mark.parametrize("name", SIG_NAMES)
def test_matches_naive_oracle(name):
    for sig, rng, ctx, t in _rationals(name, 41, 30):
        u = random_rational(sig, rng, ctx, t.sort)
        for d in range(6):
            assert bisim_to_depth(t, u, d) == agree(t, u, d)


@pytest.mark.parametrize("name", SIG_NAMES)
def test_monotone_in_depth(name):
    for sig, rng, ctx, t in _rationals(name, 42, 30):
        u = random_rational(sig, rng, ctx, t.sort)
        results = [bisim_to_depth(t, u, d) for d in range(12)]
        assert results == sorted(results, reverse=True)


@pytest.mark.parametrize("name", SIG_NAMES)
def test_equivalence_relation(name):
    for sig, rng, ctx, t in _rationals(name, 43, 20):
        u = bind_via_solve(Substitution.identity(sig, ctx), t)
        w = random_rational(sig, rng, ctx, t.sort)
        assert bisim_to_depth(t, t, 32)
        assert bisim_to_depth(t, u, 32) and bisim_to_depth(u, t, 32)
        if bisim_to_depth(t, w, 32):
            assert bisim_to_depth(u, w, 32)
        assert bisim_to_depth(t, w, 32) == bisim_to_depth(w, t, 32)


# ---- rational

def test_cycle_encodings_equal():
    a, b = cycles()
    res = bisim_rational(a, b)
    assert res.equal and res.states >= 1
    assert bisim_to_depth(a.term, b.term, 64)


def test_rational_detects_difference():
    two, _ = cycles()
    three = EquationSystem(UNARY, {"X": ((), "a")}, {"X": PCon(C, (PCon(C, (PCon(Op("z"), ()),)),))})
    res = bisim_rational(two, RationalHandle.solve(three, "X"))
    assert not res.equal and res.level == 2


def test_rational_under_binders():
    es = church_system()
    a = RationalHandle.solve(es, "C")
    b = RationalHandle.of(solve(church_system())["C"])
    assert bisim_rational(a, b).equal
    other = EquationSystem(STLC, {"C": ((), Arrow(F, Arrow("0", "0")))},
                           {"C": PCon(LAM_F, (PCon(LAM_X, (PVar(0),)),))})
    assert not bisim_rational(a, RationalHandle.solve(other, "C")).equal


def test_rational_follows_embedded_solutions():
    es = church_system()
    s = solve(es)["S"]
    wrap = EquationSystem(STLC, {"W": (("0", F), "0")},
                          {"W": PCon(APP, (PVar(1), PEmbed(s, ContextMorphism.identity(("0", F)))))})
    assert bisim_rational(RationalHandle.solve(wrap, "W"), RationalHandle.solve(es, "S")).equal


@pytest.mark.parametrize("name", SIG_NAMES)
def test_rational_agrees_with_deep_bounded(name):
    sig = builtin_signature(name)
    rng = rng_for(44)
    for _ in range(30):
        ctx = random_context(sig, rng)
        es1, r1 = random_system(sig, rng, ctx, random_sort(sig, rng, ctx))
        es2, r2 = random_system(sig, rng, ctx, es1.decls[r1][1])
        a, b = RationalHandle.solve(es1, r1), RationalHandle.solve(es2, r2)
        res = bisim_rational(a, b)
        # a difference shows up within the explored product of states
        bound = len(es1.decls) * len(es2.decls) * 4 + 1
        assert res.equal == bisim_to_depth(a.term, b.term, max(bound, 64))
        same = RationalHandle.of(bind_via_solve(Substitution.identity(sig, ctx), a.term))
        assert bisim_rational(a, same).equal


def test_provenance_required():
    with pytest.raises(ProvenanceError):
        RationalHandle.of(var(STLC, ("0",), 0))


def test_broken_provenance():
    es = EquationSystem(UNARY, {"X": ((), "a")}, {"X": ref("X", ())})
    h = RationalHandle(var(UNARY, ("a",), 0), es, "X")
    with pytest.raises(ProvenanceError):
        h.resolve()
    with pytest.raises(ProvenanceError):
        bisim_rational(h, h)


# ---- pretty

def test_pretty_named_church():
    t = solve(church_system())["C"]
    assert pretty(t, 4) == "λx0. λx1. x0 (x0 …)"
    assert pretty(embed(church_fin(2)), 4) == "λx0. λx1. x0 (x0 x1)"


def test_pretty_debruijn_church():
    t = solve(church_system())["C"]
    assert pretty(t, 4, "debruijn") == "lam{0->0,0->0}(lam{0,0}(app{0,0}(#1, app{0,0}(#1, …))))"


def test_pretty_context_names():
    t = solve(church_system())["S"]
    assert pretty(t, 2, names=["f", "x"]) == "f (f …)"
    assert pretty(t, 2) == "x0 (x0 …)"


def test_pretty_primes_on_clash():
    t = embed(fcon(STLC, LAM_X, [fvar(STLC, ("0", "0"), 1)]))
    assert pretty(t, 3, names=["x1"]) == "λx1'. x1"


def test_pretty_rejects_bad_style_and_names():
    t = var(STLC, ("0",), 0)
    with pytest.raises(ValueError):
        pretty(t, 1, "latex")
    with pytest.raises(ValueError):
        pretty(t, 1, names=["a", "b"])


def test_pretty_depth_zero_is_cut():
    assert pretty(solve(church_system())["C"], 0) == "…"


@given(st.integers(0, 6), st.integers(0, 6))
def test_debruijn_distinguishes_numerals(m, n):
    a, b = church_fin(m), church_fin(n)
    same = pretty(embed(a), 12, "debruijn") == pretty(embed(b), 12, "debruijn")
    assert same == (m == n)


def test_debruijn_tree_rendering():
    tree = Con(APP, (Var(1), CUT))
    assert pretty_tree(STLC, tree, 2, "debruijn") == "app{0,0}(#1, …)"
    assert truncate(solve(church_system())["S"], 1) == Con(APP, (Var(1), CUT))
