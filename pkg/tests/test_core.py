import random

import pytest

from localnames import (
    EMPTY_ASSIGNMENT,
    SELF,
    Cert,
    Compound,
    Contains,
    GlobalName,
    Key,
    LocalName,
    LocalNameAssignment,
    World,
    interpret,
    minimal_assignment,
    normalize_left,
    parse_expr,
)
from localnames.core import UNBOUNDED, KeyUniverse, format_keys
from localnames.sampling import Vocabulary, random_expr, random_world

K, K1, K2, K3 = Key("k"), Key("k1"), Key("k2"), Key("k3")


def test_names_reject_empty_and_reserved():
    with pytest.raises(ValueError):
        Key("")
    with pytest.raises(ValueError):
        LocalName("self")
    with pytest.raises(TypeError):
        Cert(LocalName("n"), Contains(K, K))


def test_key_denotes_itself():
    assert interpret(K1, World(), EMPTY_ASSIGNMENT, K) == {K1}


def test_example2_interpretations(w2):
    l = minimal_assignment(w2)
    assert interpret(parse_expr("#k . lampson . ron"), w2, l, K) == frozenset()
    assert interpret(parse_expr("#k . lampson . rivest"), w2, l, K) == {K3}


def test_undefined_names_are_empty():
    assert interpret(GlobalName("G"), World(), EMPTY_ASSIGNMENT, K) == frozenset()
    assert interpret(LocalName("n"), World(), EMPTY_ASSIGNMENT, K) == frozenset()


@pytest.mark.parametrize(
    "src, want",
    [
        ("n1 . (n2 . n3)", "n1 . n2 . n3"),
        ("(n1 . n2) . n3", "n1 . n2 . n3"),
        ("n1 . ((n2 . n3) . n4)", "n1 . n2 . n3 . n4"),
    ],
)
def test_normalize_left(src, want):
    got = normalize_left(parse_expr(src))
    assert got == parse_expr(want)
    assert isinstance(got, Compound) and not isinstance(got.right, Compound)


def _random_assignment(rng, vocab):
    return LocalNameAssignment(
        {(x, n): {k for k in vocab.keys if rng.random() < 0.3} for x in vocab.keys for n in vocab.locals}
    )


def test_interpretation_laws():
    vocab = Vocabulary.standard(3, 3, 2, with_self=True)
    rng = random.Random(7)
    for _ in range(300):
        w = random_world(rng, vocab)
        l1 = _random_assignment(rng, vocab)
        l2 = l1 | _random_assignment(rng, vocab)
        p, q, r = (random_expr(rng, vocab) for _ in range(3))
        for k in vocab.keys:
            assert interpret(p, w, l1, k) <= interpret(p, w, l2, k)
            assert interpret(Compound(Compound(p, q), r), w, l1, k) == interpret(
                Compound(p, Compound(q, r)), w, l1, k
            )
            assert interpret(normalize_left(p), w, l1, k) == interpret(p, w, l1, k)
            assert interpret(Compound(SELF, p), w, l1, k) == interpret(p, w, l1, k)
            assert interpret(Compound(p, SELF), w, l1, k) == interpret(p, w, l1, k)
            if not interpret(p, w, l1, k):
                assert not interpret(Compound(p, q), w, l1, k)


def test_world_widens_declared_keys_and_drops_empty_cert_sets():
    w = World({GlobalName("G"): {K1}}, {K: {Contains(LocalName("n"), K2)}, K3: set()})
    assert w.declared_keys == {K, K1, K2}
    assert K3 not in w.certs


def test_world_extension_order():
    w = World({}, {K: {Contains(LocalName("n"), K1)}})
    bigger = w.extend(certs={K1: {Contains(LocalName("m"), K2)}})
    assert w <= bigger and not bigger <= w


def test_assignment_drops_empty_entries():
    l = LocalNameAssignment({(K, LocalName("n")): set(), (K, LocalName("m")): {K1}})
    assert len(l) == 1
    assert l(K, LocalName("n")) == frozenset()
    assert l == LocalNameAssignment({(K, LocalName("m")): [K1]})


def test_key_universe_fresh_pool():
    pool = UNBOUNDED.fresh_pool({Key("fresh1")})
    assert [next(pool) for _ in range(2)] == [Key("fresh2"), Key("fresh3")]
    assert list(KeyUniverse.finite([K2, K1, K]).fresh_pool({K1})) == [K, K2]


def test_format_keys_sorted():
    assert format_keys({K2, K1}) == "#k1 #k2"
    assert format_keys(set()) == "(empty)"
