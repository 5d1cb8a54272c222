import random

import pytest

from localnames import Cert, Contains, Key, LocalName, Not, parse_formula, parse_witness
from localnames.axioms import instantiate
from localnames.core import And, KeyUniverse, UNBOUNDED, conjoin_all, formula_keys, implies
from localnames.decision import (
    Budget,
    Countermodel,
    ResourceLimit,
    Satisfiable,
    Unsatisfiable,
    Valid,
    closed_search,
    closure,
    satisfiable,
    small_open_search,
    valid_check,
)
from localnames.decision.canonical import canonical_search
from localnames.decision.common import DEFAULT_BUDGET, default_budget
from localnames.sampling import Vocabulary, random_formula
from localnames.semantics import is_consistent, models_open
from oracles import brute_open_sat

K, K1, K2, K3 = Key("k"), Key("k1"), Key("k2"), Key("k3")
n = LocalName("n")

EXAMPLE2_CERTS = conjoin_all(
    parse_formula(s)
    for s in [
        "#k certs (lampson >= #k1)",
        "#k certs (lampson >= #k2)",
        "#k1 certs (ron >= rivest)",
        "#k2 certs (rivest >= #k3)",
    ]
)


def test_closure_examples():
    info = closure(Contains(K1, K2))
    assert info.keys_of == {K1, K2} and not info.cert_candidates and info.length == 3
    assert info.bound == 18
    assert closure(Cert(K, Contains(n, K1))).cert_candidates == {K: {Contains(n, K1)}}
    c = closure(EXAMPLE2_CERTS).cert_candidates
    assert {k: len(v) for k, v in c.items()} == {K: 2, K1: 1, K2: 1}


def test_length_counts_cert_issuer_and_connectives():
    assert closure(parse_formula("#k certs (n >= #k1 . m)")).length == 6
    assert closure(parse_formula("!(a >= b) & c >= d")).length == 8


def test_satisfiable_examples():
    for u in (UNBOUNDED, KeyUniverse.finite([K1, K2])):
        result = satisfiable(Contains(K1, K1), u)
        assert isinstance(result, Satisfiable)
        assert isinstance(satisfiable(Contains(K1, K2), u), Unsatisfiable)
    linking = And(Cert(K, Contains(n, K1)), Not(Contains(parse_formula("#k . n >= #k").sup, K1)))
    assert isinstance(satisfiable(linking), Unsatisfiable)
    assert isinstance(satisfiable(linking, KeyUniverse.finite([K, K1])), Unsatisfiable)


def test_witness_revalidates_and_round_trips():
    f = parse_formula("!(a . b >= c) & a >= #k1 & #k1 certs (b >= !g . c)")
    result = satisfiable(f)
    assert isinstance(result, Satisfiable)
    assert models_open(result.witness, result.assignment, result.viewpoint, f)
    wit = parse_witness(result.render())
    assert wit.world == result.witness and wit.assignment == result.assignment
    assert models_open(wit.world, wit.assignment, wit.viewpoint, f)


def test_dns_non_theorems():
    plain = parse_formula("(#k certs (!DNS >= #k)) => (!DNS >= #k)")
    guarded = parse_formula("(!(#k certs false) & #k certs (!DNS >= #k)) => (!DNS >= #k)")
    for f in (plain, guarded):
        result = valid_check(f)
        assert isinstance(result, Countermodel)
        assert is_consistent(result.witness, result.assignment)
        assert models_open(result.witness, result.assignment, result.viewpoint, Not(f))


def test_valid_examples():
    assert isinstance(valid_check(parse_formula("a . b >= a . b")), Valid)
    assert isinstance(valid_check(parse_formula("#k . !g >= !g")), Valid)
    assert isinstance(valid_check(parse_formula("!g >= a . !g")), Valid)
    assert isinstance(valid_check(parse_formula("a . !g >= !g")), Countermodel)


def test_finite_universe_must_cover_formula_keys():
    with pytest.raises(ValueError):
        satisfiable(Contains(K1, K3), KeyUniverse.finite([K1, K2]))


def test_witnesses_valid_only_for_matching_universe():
    f = instantiate("Witnesses1", {"p": LocalName("a"), "q": LocalName("b"), "K": (K1, K2)})
    assert isinstance(valid_check(f, KeyUniverse.finite([K1, K2])), Valid)
    assert isinstance(valid_check(f, KeyUniverse.finite([K1, K2, K3])), Countermodel)
    assert isinstance(valid_check(f), Countermodel)


def test_budget():
    f = parse_formula("!(a >= b) & !(b . c >= a . !g) & !(x . y >= y . x)")
    with pytest.raises(ResourceLimit):
        satisfiable(f, budget=3)
    with pytest.raises(ResourceLimit):
        satisfiable(f, KeyUniverse.finite([K1, K2]), budget=3)


def test_budget_from_environment(monkeypatch):
    monkeypatch.delenv("NAMES_BUDGET", raising=False)
    assert default_budget() == DEFAULT_BUDGET
    monkeypatch.setenv("NAMES_BUDGET", "42")
    assert Budget().limit == 42


def _tiny(seed, with_self=False):
    rng = random.Random(seed)
    vocab = Vocabulary.standard(2, rng.randint(1, 2), rng.randint(0, 1), with_self)
    f = random_formula(rng, vocab, rng.randint(2, 5), cert_rate=0.3)
    return (Not(f) if rng.random() < 0.5 else f), vocab


@pytest.mark.parametrize("with_self", [False, True])
def test_small_search_matches_brute_force(with_self):
    checked = 0
    for seed in range(150):
        f, vocab = _tiny(seed, with_self)
        if len(vocab.locals) * len(vocab.keys) > 4:
            continue
        keys = list(vocab.keys)
        got = small_open_search(f, keys, Budget())
        assert (got is not None) == brute_open_sat(f, keys), f
        checked += 1
    assert checked > 50


@pytest.mark.parametrize("with_self", [False, True])
def test_canonical_agrees_with_exhaustive_search(with_self):
    unsat = 0
    for seed in range(400):
        rng = random.Random(seed)
        vocab = Vocabulary.standard(rng.randint(1, 3), 2, rng.randint(0, 1), with_self)
        f = random_formula(rng, vocab, rng.randint(3, 8), cert_rate=0.3)
        if rng.random() < 0.5:
            f = Not(f)
        found = canonical_search(f, UNBOUNDED.fresh_pool(formula_keys(f)), Budget())
        if found is None:
            unsat += 1
            keys = sorted(formula_keys(f)) + [Key(f"x{i}") for i in range(3)]
            assert small_open_search(f, keys, Budget()) is None, f
        else:
            w, l, v = found
            assert models_open(w, l, v, f)
    assert unsat > 10


def test_open_and_closed_satisfiability_agree():
    keys = [K1, K2, K3]
    rng = random.Random(2)
    vocab = Vocabulary.standard(3, 2, 1)
    for _ in range(150):
        f = random_formula(rng, vocab, rng.randint(2, 5), cert_rate=0.3)
        if rng.random() < 0.5:
            f = Not(f)
        opened = isinstance(satisfiable(f, KeyUniverse.finite(keys)), Satisfiable)
        assert opened == (closed_search(f, keys, Budget()) is not None), f


def test_self_viewpoint_is_branched():
    assert isinstance(valid_check(parse_formula("self . a >= a")), Valid)
    assert isinstance(satisfiable(parse_formula("self >= #k1 & !(a >= #k1 . a)")), Unsatisfiable)
    result = satisfiable(parse_formula("!(self >= #k1) & !(self >= #k2)"))
    assert isinstance(result, Satisfiable) and result.viewpoint not in {K1, K2}
    assert isinstance(
        satisfiable(parse_formula("!(self >= #k1) & !(self >= #k2)"), KeyUniverse.finite([K1, K2])), Unsatisfiable
    )


def test_implication_chain():
    f = implies(parse_formula("a >= b & b >= c"), parse_formula("a >= c"))
    assert isinstance(valid_check(f), Valid)
