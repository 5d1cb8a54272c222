"""A registry of axiom schemas, with instantiation and random instances.

Each schema names its metavariables and their sorts, and a template that
builds the formula from a binding of those metavariables.  The registry
covers the axioms for infinite key universes, the two extra schemas that
need a finite universe, the two schemas for ``self``, and a separate
registry of tempting formulas that are *not* valid.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Callable, Mapping

from .core import (
    SELF,
    And,
    Cert,
    Compound,
    Contains,
    Expr,
    FALSE,
    Formula,
    GlobalName,
    Key,
    LocalName,
    Not,
    conjoin_all,
    disjoin_all,
    iff,
    implies,
)
from .sampling import Vocabulary, random_expr


class KindMismatch(TypeError):
    """A metavariable was bound to something of the wrong sort."""


# sorts of metavariables
EXPR = "expr"
KEY = "key"
LOCAL = "local"
GLOBAL_OR_KEY = "global-or-key"
KEYS = "keys"  # a nonempty tuple of distinct keys
LOCALS = "locals"  # a tuple of local names, one per key of K
TARGETS = "targets"  # a tuple of keys, one per key of K

_EXPR_TYPES = (Key, GlobalName, LocalName, type(SELF), Compound)


@dataclass(frozen=True)
class Schema:
    name: str
    signature: tuple[tuple[str, str], ...]
    template: Callable[[Mapping[str, Any]], Formula]
    family: str  # inf | fin | self | invalid
    distinct: tuple[str, ...] = ()  # key slots that must differ

    def __str__(self) -> str:
        return self.name


def _c(p: Expr, q: Expr) -> Contains:
    return Contains(p, q)


def _d(p: Expr, q: Expr) -> Compound:
    return Compound(p, q)


def _witnesses1(b):
    p, q = b["p"], b["q"]
    return implies(Not(_c(p, q)), disjoin_all(And(Not(_c(p, k)), _c(q, k)) for k in b["K"]))


def _witnesses2(b):
    p, q, k1 = b["p"], b["q"], b["k1"]
    return implies(_c(_d(p, q), k1), disjoin_all(And(_c(p, k), _c(_d(k, q), k1)) for k in b["K"]))


def _current_principal(b):
    return disjoin_all(
        iff(_c(n, t), _c(_d(k, n), t)) for k, n, t in zip(b["K"], b["n"], b["l"])
    )


def _misread_ron(b):
    k, k1, k2, k3 = b["k"], b["k1"], b["k2"], b["k3"]
    lampson, ron, rivest = LocalName("lampson"), LocalName("ron"), LocalName("rivest")
    certs = conjoin_all(
        [
            Cert(k, _c(lampson, k1)),
            Cert(k, _c(lampson, k2)),
            Cert(k1, _c(ron, rivest)),
            Cert(k2, _c(rivest, k3)),
        ]
    )
    return implies(certs, _c(_d(k, _d(lampson, ron)), k3))


_P, _Q, _R = ("p", EXPR), ("q", EXPR), ("r", EXPR)

SCHEMAS: dict[str, Schema] = {
    s.name: s
    for s in [
        Schema("Reflexivity", (_P,), lambda b: _c(b["p"], b["p"]), "inf"),
        Schema(
            "Transitivity",
            (_P, _Q, _R),
            lambda b: implies(_c(b["p"], b["q"]), implies(_c(b["q"], b["r"]), _c(b["p"], b["r"]))),
            "inf",
        ),
        Schema(
            "LeftMonotonicity",
            (_P, _Q, _R),
            lambda b: implies(_c(b["p"], b["q"]), _c(_d(b["p"], b["r"]), _d(b["q"], b["r"]))),
            "inf",
        ),
        Schema(
            "Associativity1",
            (_P, _Q, _R),
            lambda b: _c(_d(_d(b["p"], b["q"]), b["r"]), _d(b["p"], _d(b["q"], b["r"]))),
            "inf",
        ),
        Schema(
            "Associativity2",
            (_P, _Q, _R),
            lambda b: _c(_d(b["p"], _d(b["q"], b["r"])), _d(_d(b["p"], b["q"]), b["r"])),
            "inf",
        ),
        Schema(
            "KeyGlobality",
            (("k", KEY), ("g", GLOBAL_OR_KEY)),
            lambda b: _c(_d(b["k"], b["g"]), b["g"]),
            "inf",
        ),
        Schema(
            "Globality",
            (_P, ("k", KEY), ("g", GLOBAL_OR_KEY)),
            lambda b: implies(_c(_d(b["p"], b["k"]), b["k"]), _c(_d(b["p"], b["g"]), b["g"])),
            "inf",
        ),
        Schema(
            "ConverseGlobality",
            (_P, ("g", GLOBAL_OR_KEY)),
            lambda b: _c(b["g"], _d(b["p"], b["g"])),
            "inf",
        ),
        Schema(
            "KeyLinking",
            (("k", KEY), ("n", LOCAL), _R),
            lambda b: implies(Cert(b["k"], _c(b["n"], b["r"])), _c(_d(b["k"], b["n"]), _d(b["k"], b["r"]))),
            "inf",
        ),
        Schema(
            "NonemptinessA",
            (_P, ("k1", KEY), ("k", KEY)),
            lambda b: implies(_c(b["p"], b["k1"]), _c(_d(b["p"], b["k"]), b["k"])),
            "inf",
        ),
        Schema(
            "NonemptinessB",
            (_P, _Q, ("k", KEY)),
            lambda b: implies(Not(_c(b["p"], b["q"])), _c(_d(b["q"], b["k"]), b["k"])),
            "inf",
        ),
        Schema(
            "NonemptinessC",
            (_P, _Q, ("k1", KEY), ("k", KEY)),
            lambda b: implies(_c(_d(b["p"], b["q"]), b["k1"]), _c(_d(b["p"], b["k"]), b["k"])),
            "inf",
        ),
        Schema(
            "NonemptinessD",
            (_P, ("k", KEY), ("k2", KEY)),
            lambda b: implies(And(_c(_d(b["p"], b["k"]), b["k"]), _c(b["k2"], b["p"])), _c(b["p"], b["k2"])),
            "inf",
        ),
        Schema(
            "KeyDistinctness",
            (("k1", KEY), ("k2", KEY)),
            lambda b: Not(_c(b["k1"], b["k2"])),
            "inf",
            distinct=("k1", "k2"),
        ),
        Schema("Witnesses1", (_P, _Q, ("K", KEYS)), _witnesses1, "fin"),
        Schema("Witnesses2", (_P, _Q, ("k1", KEY), ("K", KEYS)), _witnesses2, "fin"),
        Schema(
            "CurrentPrincipal",
            (("K", KEYS), ("n", LOCALS), ("l", TARGETS)),
            _current_principal,
            "fin",
        ),
        Schema("Identity1", (_P,), lambda b: _c(_d(SELF, b["p"]), b["p"]), "self"),
        Schema("Identity2", (_P,), lambda b: _c(b["p"], _d(SELF, b["p"])), "self"),
        Schema("Identity3", (_P,), lambda b: _c(_d(b["p"], SELF), b["p"]), "self"),
        Schema("Identity4", (_P,), lambda b: _c(b["p"], _d(b["p"], SELF)), "self"),
        Schema(
            "SelfIsKey",
            (_P, ("k", KEY)),
            lambda b: implies(And(_c(SELF, b["p"]), _c(_d(b["p"], b["k"]), b["k"])), _c(b["p"], SELF)),
            "self",
        ),
    ]
}

NON_THEOREMS: dict[str, Schema] = {
    s.name: s
    for s in [
        Schema(
            "GeneralizedLinking",
            (("k", KEY), ("p1", EXPR), ("p2", EXPR)),
            lambda b: implies(Cert(b["k"], _c(b["p1"], b["p2"])), _c(_d(b["k"], b["p1"]), _d(b["k"], b["p2"]))),
            "invalid",
        ),
        Schema(
            "UnrestrictedGlobality",
            (_P, ("g", GLOBAL_OR_KEY)),
            lambda b: _c(_d(b["p"], b["g"]), b["g"]),
            "invalid",
        ),
        Schema(
            "CertifiedGlobal",
            (("k", KEY), ("g", GLOBAL_OR_KEY)),
            lambda b: implies(Cert(b["k"], _c(b["g"], b["k"])), _c(b["g"], b["k"])),
            "invalid",
        ),
        Schema(
            "ConsistentCertifiedGlobal",
            (("k", KEY), ("g", GLOBAL_OR_KEY)),
            lambda b: implies(
                And(Not(Cert(b["k"], FALSE)), Cert(b["k"], _c(b["g"], b["k"]))), _c(b["g"], b["k"])
            ),
            "invalid",
        ),
        Schema(
            "UnboundKeyChain",
            (("k", KEY), ("k1", KEY)),
            lambda b: _c(_d(b["k"], _d(LocalName("lampson"), b["k1"])), b["k1"]),
            "invalid",
        ),
        Schema(
            "MisreadRon",
            (("k", KEY), ("k1", KEY), ("k2", KEY), ("k3", KEY)),
            _misread_ron,
            "invalid",
            distinct=("k", "k1", "k2", "k3"),
        ),
    ]
}


def get_schema(name: str) -> Schema:
    try:
        return SCHEMAS.get(name) or NON_THEOREMS[name]
    except KeyError:
        raise KeyError(f"unknown schema {name!r}") from None


def list_schemas(include_invalid: bool = False) -> list[str]:
    names = list(SCHEMAS)
    if include_invalid:
        names += list(NON_THEOREMS)
    return names


def _check(slot: str, sort: str, value: Any, size: int | None) -> None:
    def fail(want: str) -> None:
        raise KindMismatch(f"slot {slot} needs {want}, got {value!r}")

    if sort == EXPR:
        if not isinstance(value, _EXPR_TYPES):
            fail("a principal expression")
    elif sort == KEY:
        if not isinstance(value, Key):
            fail("a key")
    elif sort == LOCAL:
        if not isinstance(value, LocalName):
            fail("a local name")
    elif sort == GLOBAL_OR_KEY:
        if not isinstance(value, (GlobalName, Key)):
            fail("a global name or a key")
    elif sort == KEYS:
        if not value or not all(isinstance(k, Key) for k in value) or len(set(value)) != len(value):
            fail("a nonempty tuple of distinct keys")
    else:
        want = LocalName if sort == LOCALS else Key
        if not all(isinstance(x, want) for x in value) or len(value) != size:
            fail(f"one {want.__name__} per key of K")


def instantiate(s: Schema | str, bindings: Mapping[str, Any]) -> Formula:
    """Substitute bindings into the schema, checking every slot's sort."""
    if isinstance(s, str):
        s = get_schema(s)
    size = len(bindings["K"]) if "K" in bindings else None
    for slot, sort in s.signature:
        if slot not in bindings:
            raise KindMismatch(f"schema {s.name} needs a binding for {slot}")
        _check(slot, sort, bindings[slot], size)
    extra = set(bindings) - {slot for slot, _ in s.signature}
    if extra:
        raise KindMismatch(f"schema {s.name} has no slot {', '.join(sorted(extra))}")
    chosen = [bindings[x] for x in s.distinct]
    if len(set(chosen)) != len(chosen):
        raise KindMismatch(f"schema {s.name} needs distinct keys for {', '.join(s.distinct)}")
    return s.template(bindings)


def random_bindings(s: Schema, pool: Vocabulary, rng: random.Random, max_len: int = 2) -> dict[str, Any]:
    b: dict[str, Any] = {}
    keys = list(pool.keys)
    distinct = iter(rng.sample(keys, len(s.distinct))) if s.distinct else None
    for slot, sort in s.signature:
        if slot in s.distinct:
            b[slot] = next(distinct)
        elif sort == EXPR:
            b[slot] = random_expr(rng, pool, max_len)
        elif sort == KEY:
            b[slot] = rng.choice(keys)
        elif sort == LOCAL:
            b[slot] = rng.choice(pool.locals)
        elif sort == GLOBAL_OR_KEY:
            b[slot] = rng.choice(list(pool.globals) + keys)
        elif sort == KEYS:
            b[slot] = tuple(keys)
        elif sort == LOCALS:
            b[slot] = tuple(rng.choice(pool.locals) for _ in keys)
        else:
            b[slot] = tuple(rng.choice(keys) for _ in keys)
    return b


def random_instance(s: Schema | str, pool: Vocabulary, seed: int, max_len: int = 2) -> Formula:
    """A kind-correct instance of s drawn from the pool; the seed fixes it.

    Slots of sort ``keys`` receive every key of the pool, so finite-only
    schemas are instantiated over exactly that universe.
    """
    if isinstance(s, str):
        s = get_schema(s)
    rng = random.Random(f"{s.name}:{seed}")
    return instantiate(s, random_bindings(s, pool, rng, max_len))


__all__ = [
    "NON_THEOREMS",
    "SCHEMAS",
    "KindMismatch",
    "Schema",
    "get_schema",
    "instantiate",
    "list_schemas",
    "random_bindings",
    "random_instance",
]
