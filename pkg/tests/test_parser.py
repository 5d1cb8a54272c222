import pytest
from hypothesis import given, settings, strategies as st

from localnames import (
    FALSE,
    SELF,
    And,
    Cert,
    Compound,
    Contains,
    GlobalName,
    Key,
    LocalName,
    Not,
    parse_expr,
    parse_formula,
    parse_world,
    render,
)
from localnames.core import implies
from localnames.parser import ErrorKind, ParseError, parse_witness, render_witness

K, K1, K2 = Key("k"), Key("k1"), Key("k2")
n = LocalName("n")


def test_expr_left_associative():
    assert parse_expr("#k1 . lampson . ron") == Compound(Compound(K1, LocalName("lampson")), LocalName("ron"))


def test_ref_sugar():
    want = Compound(Compound(Compound(GlobalName("DNS"), LocalName("com")), LocalName("fudge")), LocalName("bob"))
    assert parse_expr("(ref: !DNS, com, fudge, bob)") == want
    assert parse_expr("(ref:)") == SELF


def test_explicit_parens_kept():
    assert parse_expr("n1 . (n2 . n3)") == Compound(LocalName("n1"), Compound(LocalName("n2"), LocalName("n3")))


def test_formula_examples():
    assert parse_formula("#k certs (n >= #k1)") == Cert(K, Contains(n, K1))
    assert parse_formula("!(#k1 >= #k2)") == Not(Contains(K1, K2))
    a, b = LocalName("a"), LocalName("b")
    assert parse_formula("a >= b => b >= a") == implies(Contains(a, b), Contains(b, a))
    assert parse_formula("false") == FALSE
    assert parse_formula("!false") == Not(FALSE)


def test_precedence():
    f = parse_formula("!a >= b & c >= d | e >= f => g >= h")
    # parsed as ((!a>=b & c>=d) | e>=f) => g>=h, with !a a global name
    assert render(f) == "!a >= b & c >= d | e >= f => g >= h"
    assert isinstance(parse_formula("a >= b & c >= d"), And)
    g = parse_formula("a >= b => b >= c => c >= d")
    assert g == implies(
        Contains(LocalName("a"), LocalName("b")),
        implies(Contains(LocalName("b"), LocalName("c")), Contains(LocalName("c"), LocalName("d"))),
    )


def test_certs_takes_unary_operand():
    f = parse_formula("#k certs n >= #k1 & #k1 >= #k1")
    assert f == And(Cert(K, Contains(n, K1)), Contains(K1, K1))


@pytest.mark.parametrize(
    "text, kind",
    [
        ("lampson certs (n >= #k1)", ErrorKind.NAMESPACE_CLASH),
        ("#self >= #k", ErrorKind.NAMESPACE_CLASH),
        ("a >= ", ErrorKind.DANGLING_OPERATOR),
        ("a >= b & ", ErrorKind.DANGLING_OPERATOR),
        ("a >= b >= c", ErrorKind.UNEXPECTED_TOKEN),
        ("A >= b", ErrorKind.UNEXPECTED_TOKEN),
        ("a >= b $", ErrorKind.UNEXPECTED_TOKEN),
    ],
)
def test_formula_errors(text, kind):
    with pytest.raises(ParseError) as info:
        parse_formula(text)
    assert info.value.kind is kind
    assert info.value.span.line == 1 and info.value.message


def test_world_file():
    w = parse_world("cert #k1: n >= #k2")
    assert w.certs[K1] == {Contains(n, K2)} and {K1, K2} <= w.declared_keys
    w = parse_world("global !DNS = #kd\nglobal !DNS = #ke  # union\n")
    assert w.beta[GlobalName("DNS")] == {Key("kd"), Key("ke")}
    w = parse_world("cert #k: n >= #k1\r\ncert #k: n >= #k1\r\n")
    assert len(w.certs[K]) == 1


def test_world_errors_carry_line():
    with pytest.raises(ParseError) as info:
        parse_world("keys #a\n\nfoo #k")
    assert info.value.kind is ErrorKind.UNKNOWN_DIRECTIVE and info.value.span.line == 3
    with pytest.raises(ParseError) as info:
        parse_world("cert lampson: a >= b")
    assert info.value.kind is ErrorKind.NAMESPACE_CLASH


def test_w2_round_trip(w2):
    assert len(w2.certs) == 3 and sum(map(len, w2.certs.values())) == 4
    assert parse_world(render(w2)) == w2


def test_witness_round_trip():
    text = "keys #a #b\nglobal !G = #a\ncert #a: n >= #b\nlna #a n = #b\nviewpoint #a\n"
    wit = parse_witness(text)
    assert render_witness(wit.world, wit.assignment, wit.viewpoint) == text


def test_render_examples():
    assert render(Compound(Compound(K1, LocalName("lampson")), LocalName("ron"))) == "#k1 . lampson . ron"
    assert render(Not(Contains(K1, K2))) == "!(#k1 >= #k2)"


# -- round trip over random trees ------------------------------------------

idents = st.sampled_from(["a", "b", "lampson", "x_1", "poker-buddies"])
names = st.one_of(
    st.builds(Key, idents),
    st.builds(GlobalName, idents),
    st.builds(LocalName, idents),
    st.just(SELF),
)
exprs = st.recursive(names, lambda sub: st.builds(Compound, sub, sub), max_leaves=5)
contains = st.builds(Contains, exprs, exprs)
formulas = st.recursive(
    contains,
    lambda sub: st.one_of(
        st.builds(Not, sub),
        st.builds(And, sub, sub),
        st.builds(Cert, st.builds(Key, idents), sub),
    ),
    max_leaves=6,
)


@settings(max_examples=300, deadline=None)
@given(exprs)
def test_expr_round_trip(e):
    assert parse_expr(render(e)) == e


@settings(max_examples=300, deadline=None)
@given(formulas)
def test_formula_round_trip(f):
    assert parse_formula(render(f)) == f
