import random
from itertools import chain, combinations, product

import pytest

from localnames import (
    EMPTY_ASSIGNMENT,
    Cert,
    Contains,
    InconsistentAssignment,
    Key,
    LocalName,
    LocalNameAssignment,
    Not,
    World,
    apply_step,
    holds,
    is_consistent,
    minimal_assignment,
    models_closed,
    models_open,
    parse_expr,
    parse_formula,
    parse_world,
)
from localnames.core import formula_names
from localnames.sampling import Vocabulary, extend_randomly, random_expr, random_world
from oracles import naive_lw

K, K1, K2, K3 = Key("k"), Key("k1"), Key("k2"), Key("k3")
lampson, rivest, ron = LocalName("lampson"), LocalName("rivest"), LocalName("ron")

# l_w for the four-certificate world, computed by hand
L_W2 = LocalNameAssignment({(K, lampson): {K1, K2}, (K2, rivest): {K3}})


def test_apply_step_w2(w2):
    once = apply_step(w2, EMPTY_ASSIGNMENT)
    assert once == L_W2
    assert apply_step(w2, once) == once
    assert apply_step(World(), L_W2) == EMPTY_ASSIGNMENT


def test_minimal_assignment_examples(w2):
    assert minimal_assignment(World()) == EMPTY_ASSIGNMENT
    assert minimal_assignment(w2) == L_W2
    cyclic = parse_world("cert #k: n >= n")
    assert minimal_assignment(cyclic) == EMPTY_ASSIGNMENT


def test_consistency_examples(w2):
    assert is_consistent(w2, L_W2)
    assert not is_consistent(w2, EMPTY_ASSIGNMENT)
    assert is_consistent(w2, L_W2 | LocalNameAssignment({(Key("k9"), LocalName("n")): {K1}}))


def test_holds_examples(w2):
    assert holds(w2, L_W2, K, Cert(K1, Contains(ron, rivest)))
    assert not holds(w2, L_W2, K, parse_formula("#k . lampson . ron >= #k3"))
    assert holds(w2, L_W2, K, parse_formula("lampson . ron >= lampson . ron"))


def test_models_open_examples(w2):
    assert models_open(w2, L_W2, K, Contains(lampson, K1))
    with pytest.raises(InconsistentAssignment):
        models_open(w2, EMPTY_ASSIGNMENT, K, Contains(lampson, K1))
    assert models_open(World(), EMPTY_ASSIGNMENT, K, Contains(lampson, lampson))


def test_models_closed_examples(w2):
    assert models_closed(w2, K, parse_formula("#k . lampson . rivest >= #k3"))
    assert not models_closed(w2, K, parse_formula("#k . lampson . ron >= #k3"))
    assert models_closed(World(), K, Not(Contains(K1, K2)))


def test_cert_clause_is_syntactic():
    w = parse_world("cert #k: n >= a . (b . c)")
    assert models_closed(w, K, parse_formula("#k certs (n >= a . (b . c))"))
    assert not models_closed(w, K, parse_formula("#k certs (n >= a . b . c)"))


VOCAB = Vocabulary.standard(4, 3, 2, with_self=True)


def test_minimal_assignment_matches_kleene_iteration():
    rng = random.Random(11)
    for _ in range(300):
        w = random_world(rng, VOCAB)
        assert minimal_assignment(w) == naive_lw(w)


def _subsets(xs):
    return [frozenset(s) for s in chain.from_iterable(combinations(xs, r) for r in range(len(xs) + 1))]


def test_least_fixpoint_and_conclusion_agreement():
    # every consistent assignment over a small slice lies above l_w, and
    # closed conclusions p >= k are exactly those true under all of them
    vocab = Vocabulary.standard(2, 2, 1)
    rng = random.Random(5)
    slots = [(x, n) for x in vocab.keys for n in vocab.locals]
    sets = _subsets(vocab.keys)
    for _ in range(25):
        w = random_world(rng, vocab, max_certs=4, inert_rate=0.0)
        lw = minimal_assignment(w)
        consistent = [
            l
            for l in (LocalNameAssignment(dict(zip(slots, vs))) for vs in product(sets, repeat=len(slots)))
            if is_consistent(w, l)
        ]
        assert consistent and all(lw <= l for l in consistent)
        for _ in range(10):
            p = random_expr(rng, vocab)
            for k1, k2 in product(vocab.keys, repeat=2):
                f = Contains(p, k2)
                assert models_closed(w, k1, f, lw) == all(holds(w, l, k1, f) for l in consistent)


def test_closed_conclusions_persist_in_extensions():
    rng = random.Random(3)
    for _ in range(200):
        w = random_world(rng, VOCAB)
        bigger = extend_randomly(rng, w, VOCAB)
        lw, lw2 = minimal_assignment(w), minimal_assignment(bigger)
        for _ in range(5):
            p = random_expr(rng, VOCAB)
            for k, k1 in product(VOCAB.keys, repeat=2):
                if models_closed(w, k, Contains(p, k1), lw):
                    assert models_closed(bigger, k, Contains(p, k1), lw2)


def test_inert_certificates_do_not_matter():
    rng = random.Random(9)
    inert = [parse_formula(s) for s in ["#k1 >= #k2", "!(a >= b)", "!G . a >= b", "#k1 certs (a >= #k1)", "false"]]
    for _ in range(100):
        w = random_world(rng, VOCAB)
        extra = {k: {rng.choice(inert)} for k in rng.sample(VOCAB.keys, 2)}
        assert minimal_assignment(w.extend(certs=extra)) == minimal_assignment(w)


def test_local_free_atoms_ignore_certificates():
    rng = random.Random(4)
    vocab = Vocabulary(VOCAB.keys, (), VOCAB.globals, True)
    for _ in range(100):
        w = random_world(rng, VOCAB)
        other = random_world(rng, VOCAB)
        swapped = w.with_certs(other.certs)
        f = Contains(random_expr(rng, vocab), random_expr(rng, vocab))
        assert not any(isinstance(a, LocalName) for a in formula_names(f))
        for k in VOCAB.keys:
            assert models_closed(w, k, f) == models_closed(swapped, k, f)


def test_example1_key_chain_resolves_only_with_binding():
    f = Contains(parse_expr("#k . (lampson . #k1)"), K1)
    assert not models_closed(World(), K, f)
    assert models_closed(parse_world("cert #k: lampson >= #k2"), K, f)
