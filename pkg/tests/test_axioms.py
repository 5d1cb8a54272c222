import random

import pytest

from localnames import Compound, Contains, Key, LocalName, Not, minimal_assignment, models_closed, parse_expr
from localnames.axioms import NON_THEOREMS, SCHEMAS, KindMismatch, instantiate, list_schemas, random_instance
from localnames.core import GlobalName, KeyUniverse, UNBOUNDED, And, Cert, disjoin, implies
from localnames.decision import Countermodel, Valid, valid_check
from localnames.sampling import Vocabulary, random_world

K, K1, K2 = Key("k"), Key("k1"), Key("k2")
a, b, n = LocalName("a"), LocalName("b"), LocalName("n")

ALL_INF = [s for s in SCHEMAS.values() if s.family == "inf"]
FIN = [s for s in SCHEMAS.values() if s.family == "fin"]
SELF_SCHEMAS = [s for s in SCHEMAS.values() if s.family == "self"]


def test_registry_names():
    assert list_schemas() == [
        "Reflexivity", "Transitivity", "LeftMonotonicity", "Associativity1", "Associativity2",
        "KeyGlobality", "Globality", "ConverseGlobality", "KeyLinking",
        "NonemptinessA", "NonemptinessB", "NonemptinessC", "NonemptinessD", "KeyDistinctness",
        "Witnesses1", "Witnesses2", "CurrentPrincipal",
        "Identity1", "Identity2", "Identity3", "Identity4", "SelfIsKey",
    ]  # fmt: skip
    assert set(list_schemas(include_invalid=True)) - set(list_schemas()) == set(NON_THEOREMS)


def test_instantiate_examples():
    p = parse_expr("lampson . ron")
    assert instantiate("Reflexivity", {"p": p}) == Contains(p, p)
    assert instantiate("KeyLinking", {"k": K, "n": n, "r": K1}) == implies(
        Cert(K, Contains(n, K1)), Contains(Compound(K, n), Compound(K, K1))
    )
    assert instantiate("Witnesses1", {"p": a, "q": b, "K": (K1, K2)}) == implies(
        Not(Contains(a, b)),
        disjoin(And(Not(Contains(a, K1)), Contains(b, K1)), And(Not(Contains(a, K2)), Contains(b, K2))),
    )


@pytest.mark.parametrize(
    "schema, bindings",
    [
        ("KeyLinking", {"k": K, "n": parse_expr("a . b"), "r": K1}),
        ("KeyLinking", {"k": a, "n": n, "r": K1}),
        ("KeyGlobality", {"k": K, "g": a}),
        ("KeyDistinctness", {"k1": K1, "k2": K1}),
        ("Reflexivity", {}),
        ("Reflexivity", {"p": a, "q": b}),
        ("CurrentPrincipal", {"K": (K1, K2), "n": (a,), "l": (K1, K2)}),
        ("Witnesses1", {"p": a, "q": b, "K": ()}),
    ],
)
def test_kind_mismatch(schema, bindings):
    with pytest.raises(KindMismatch):
        instantiate(schema, bindings)


def test_random_instance_is_deterministic():
    pool = Vocabulary.standard(3, 2, 1)
    first = random_instance("Transitivity", pool, 0)
    assert first == random_instance("Transitivity", pool, 0)
    assert any(random_instance("Transitivity", pool, s) != first for s in range(1, 5))


@pytest.mark.parametrize("schema", ALL_INF, ids=str)
def test_infinite_axioms_valid(schema):
    pool = Vocabulary.standard(3, 2, 2)
    rng = random.Random(schema.name)
    worlds = [random_world(rng, pool) for _ in range(10)]
    lws = [minimal_assignment(w) for w in worlds]
    for seed in range(40):
        f = random_instance(schema, pool, seed)
        assert isinstance(valid_check(f, UNBOUNDED), Valid), f
        for w, lw in zip(worlds, lws):
            assert all(models_closed(w, k, f, lw) for k in pool.keys)


@pytest.mark.parametrize("schema", FIN, ids=str)
def test_finite_axioms(schema):
    pool = Vocabulary.standard(2, 2, 1)
    for seed in range(20):
        f = random_instance(schema, pool, seed)
        assert isinstance(valid_check(f, KeyUniverse.finite(pool.keys)), Valid), f


def test_witnesses_fail_in_bigger_universes():
    pool = Vocabulary.standard(2, 2, 1)
    for name in ("Witnesses1", "Witnesses2", "CurrentPrincipal"):
        bad = [
            seed
            for seed in range(10)
            if isinstance(
                valid_check(random_instance(name, pool, seed), KeyUniverse.finite([*pool.keys, Key("k3")])),
                Countermodel,
            )
        ]
        assert bad, name


@pytest.mark.parametrize("schema", SELF_SCHEMAS, ids=str)
def test_self_axioms(schema):
    pool = Vocabulary.standard(2, 2, 1, with_self=True)
    for seed in range(30):
        f = random_instance(schema, pool, seed)
        assert isinstance(valid_check(f), Valid), f
        assert isinstance(valid_check(f, KeyUniverse.finite(pool.keys)), Valid), f


@pytest.mark.parametrize("schema", list(NON_THEOREMS.values()), ids=str)
def test_non_theorems_have_countermodels(schema):
    pool = Vocabulary.standard(4, 2, 2)
    results = [valid_check(random_instance(schema, pool, seed)) for seed in range(10)]
    assert any(isinstance(r, Countermodel) for r in results)


def test_generalized_linking_with_compound():
    f = instantiate("GeneralizedLinking", {"k": K, "p1": parse_expr("a . b"), "p2": K1})
    assert isinstance(valid_check(f), Countermodel)
    g = instantiate("GeneralizedLinking", {"k": K, "p1": a, "p2": K1})
    assert isinstance(valid_check(g), Valid)


def test_unrestricted_globality_with_global():
    f = instantiate("UnrestrictedGlobality", {"p": a, "g": GlobalName("G")})
    assert isinstance(valid_check(f), Countermodel)
