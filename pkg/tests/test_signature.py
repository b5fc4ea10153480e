import pytest
from hypothesis import given, strategies as st

from cocalc.signature import (Arity, Arrow, BinderArity, FiniteSignature, Op, SignatureError,
                              SignatureSyntaxError, SortSyntaxError, arg, arrows, builtin_signature,
                              format_sort, parse_signature, parse_sort, print_signature, spine,
                              validate_signature)

atoms = st.sampled_from(["0", "1", "p"])
simple_types = st.recursive(atoms, lambda inner: st.builds(Arrow, inner, inner), max_leaves=8)
forest_sorts = st.tuples(simple_types, st.sampled_from(["v", "t", "e"]))


@given(simple_types)
def test_sort_print_parse_roundtrip(s):
    assert parse_sort(format_sort(s)) == s


@given(forest_sorts)
def test_pair_sort_roundtrip(s):
    assert parse_sort(format_sort(s)) == s


@given(simple_types)
def test_spine_recomposes(s):
    bs, p = spine(s)
    assert not isinstance(p, Arrow)
    assert arrows(*bs, p) == s


def test_arrow_printing_is_right_associative():
    s = parse_sort("(0->0)->0->0")
    assert s == Arrow(Arrow("0", "0"), Arrow("0", "0"))
    assert format_sort(s) == "(0->0)->0->0"
    assert parse_sort(" 0 -> (0 -> 0) ") == parse_sort("0->0->0")


@pytest.mark.parametrize("text", ["", "->0", "(0", "0->", "<0,t", "0 ) 0", "0 $"])
def test_bad_sorts(text):
    with pytest.raises(SortSyntaxError):
        parse_sort(text)


@given(simple_types, simple_types)
def test_stlc_arities(s, t):
    sig = builtin_signature("stlc", ("0", "1", "p"))
    assert sig.arity(Op("app", (s, t))) == Arity((BinderArity((), Arrow(s, t)), BinderArity((), s)), t)
    assert sig.arity(Op("lam", (s, t))) == Arity((BinderArity((s,), t),), Arrow(s, t))


def test_stlc_probe_valid():
    sig = builtin_signature("stlc")
    report = validate_signature(sig, [Op("app", ("0", "0")), Op("lam", ("0", "0"))])
    assert report.ok
    assert [str(r.arity) for r in report.results] == ["0->0, 0 -> 0", "[0]0 -> 0->0"]


def test_untyped_forest_arities():
    sig = builtin_signature("untyped-forests")
    assert sig.arity(Op("sum", (0,))) == Arity((), "t")
    assert sig.arity(Op("lam")) == Arity((arg("t", "v"),), "t")
    assert sig.arity(Op("tup", (2,))) == Arity((arg("v"), arg("t"), arg("t")), "e")
    assert not any(a.target == "v" for a in (sig.arity(op) for op in sig.probe()))


def test_typed_forest_tuple_arity():
    sig = builtin_signature("typed-forests")
    b1, b2 = parse_sort("0->0"), "0"
    ar = sig.arity(Op("tup", ((b1, b2), "0")))
    head = arrows(b1, b2, "0")
    assert ar.args[0] == BinderArity((), (head, "v"))
    assert [a.sort for a in ar.args[1:]] == [(b1, "t"), (b2, "t")]
    assert ar.target == ("0", "e")
    assert sig.arity(Op("lam", ("0", "0"))) == Arity((arg(("0", "t"), ("0", "v")),), (Arrow("0", "0"), "t"))
    assert sig.arity(Op("sum", ("0", 2))) == Arity((arg(("0", "e")), arg(("0", "e"))), ("0", "t"))


def test_typed_forest_sum_needs_atom():
    sig = builtin_signature("typed-forests")
    with pytest.raises(SignatureError):
        sig.arity(Op("sum", (Arrow("0", "0"), 1)))


def test_arity_is_pure_on_probe():
    for name in ("stlc", "untyped-forests", "typed-forests"):
        sig = builtin_signature(name)
        report = validate_signature(sig)
        assert report.ok, report.lines()
        for op in sig.probe():
            assert sig.arity(op) == sig._arity(op)


def test_unknown_builtin():
    with pytest.raises(SignatureError):
        builtin_signature("pcf")


def test_validation_names_undeclared_sort():
    sig = FiniteSignature(["a"], {"f": Arity((arg("b"),), "a")})
    report = validate_signature(sig)
    assert not report.ok
    assert "undeclared sort b" in report.lines()[0]


def test_empty_probe_is_vacuously_valid():
    report = validate_signature(FiniteSignature([], {}), [])
    assert report.ok and report.lines() == []


FOREST_DSL = """
# untyped forests, sums up to two summands
sorts { v; t; e; }
ops {
  lam : [v]t -> t;
  sum0 : -> t;
  sum1 : e -> t;
  sum2 : e, e -> t;
  tup1 : v, t -> e;
}
"""


def test_parse_forest_dsl():
    sig = parse_signature(FOREST_DSL)
    assert sig.sorts == ("v", "t", "e")
    assert len(sig.ops) == 5
    assert sig.arity(Op("lam")) == Arity((arg("t", "v"),), "t")
    assert sig.arity(Op("sum0")) == Arity((), "t")
    assert validate_signature(sig).ok


def test_parse_empty_signature():
    sig = parse_signature("sorts {}; ops {}")
    assert sig.sorts == () and sig.ops == {}


@pytest.mark.parametrize("text, where, needle", [
    ("sorts { a; } ops { f : b -> a; }", (1, 24), "undeclared sort 'b'"),
    ("sorts { a; a; } ops { }", (1, 12), "duplicate sort"),
    ("sorts { a; } ops { f : -> a; f : -> a; }", (1, 30), "duplicate constructor"),
    ("sorts { a; }\nops { f : a a; }", (2, 13), "expected"),
    ("sorts { a; } ops { f : -> a; } extra", (1, 32), "expected"),
    ("sorts { a; } ops { f : -> a $ }", (1, 29), "unexpected character"),
])
def test_dsl_errors_carry_position(text, where, needle):
    with pytest.raises(SignatureSyntaxError) as ei:
        parse_signature(text)
    assert (ei.value.line, ei.value.col) == where
    assert needle in str(ei.value)


names = st.sampled_from(["a", "b", "c", "s0"])


@st.composite
def finite_signatures(draw):
    sorts = draw(st.lists(names, min_size=1, max_size=4, unique=True))
    n_ops = draw(st.integers(0, 4))
    ops = {}
    for k in range(n_ops):
        args = draw(st.lists(st.tuples(st.lists(st.sampled_from(sorts), max_size=2), st.sampled_from(sorts)),
                             max_size=3))
        ops[f"op{k}"] = Arity(tuple(BinderArity(tuple(b), s) for b, s in args), draw(st.sampled_from(sorts)))
    return FiniteSignature(sorts, ops)


@given(finite_signatures())
def test_signature_print_parse_roundtrip(sig):
    again = parse_signature(print_signature(sig))
    assert again.sorts == sig.sorts
    assert again.ops == sig.ops
    assert again == sig
