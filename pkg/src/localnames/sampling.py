"""Seeded random worlds, expressions and formulas for property tests."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .core import (
    SELF,
    And,
    Cert,
    Contains,
    Expr,
    Formula,
    GlobalName,
    Key,
    LocalName,
    Name,
    Not,
    World,
    chain,
)


@dataclass(frozen=True)
class Vocabulary:
    keys: tuple[Key, ...]
    locals: tuple[LocalName, ...]
    globals: tuple[GlobalName, ...] = ()
    with_self: bool = False

    @classmethod
    def standard(cls, n_keys: int, n_locals: int, n_globals: int, with_self: bool = False) -> "Vocabulary":
        return cls(
            tuple(Key(f"k{i}") for i in range(1, n_keys + 1)),
            tuple(LocalName(x) for x in "abcdefgh"[:n_locals]),
            tuple(GlobalName(x) for x in "GHIJ"[:n_globals]),
            with_self,
        )

    def atoms(self) -> list[Name]:
        out: list[Name] = [*self.keys, *self.locals, *self.globals]
        if self.with_self:
            out.append(SELF)
        return out


def random_expr(rng: random.Random, vocab: Vocabulary, max_len: int = 3) -> Expr:
    """A compound of 1..max_len atoms with random grouping."""
    atoms = vocab.atoms()
    parts: list[Expr] = [rng.choice(atoms) for _ in range(rng.randint(1, max_len))]
    # random bracketing: repeatedly merge a neighbouring pair
    while len(parts) > 1:
        i = rng.randrange(len(parts) - 1)
        parts[i : i + 2] = [chain(parts[i : i + 2])]
    return parts[0]


def random_binding(rng: random.Random, vocab: Vocabulary, max_len: int = 3) -> Contains:
    return Contains(rng.choice(vocab.locals), random_expr(rng, vocab, max_len))


def random_world(
    rng: random.Random,
    vocab: Vocabulary,
    max_certs: int = 10,
    max_len: int = 3,
    inert_rate: float = 0.1,
) -> World:
    """Random global bindings and certificates over the vocabulary.

    A small share of certificates have bodies that bind nothing, so code
    that must ignore them gets exercised.
    """
    beta = {g: {k for k in vocab.keys if rng.random() < 0.4} for g in vocab.globals}
    certs: dict[Key, set[Formula]] = {}
    for _ in range(rng.randint(0, max_certs)):
        k = rng.choice(vocab.keys)
        if rng.random() < inert_rate:
            body: Formula = Contains(random_expr(rng, vocab, 2), random_expr(rng, vocab, 2))
            if isinstance(body.sup, LocalName):
                body = Not(body)
        else:
            body = random_binding(rng, vocab, max_len)
        certs.setdefault(k, set()).add(body)
    return World(beta, certs, frozenset(vocab.keys))


def random_formula(
    rng: random.Random,
    vocab: Vocabulary,
    size: int,
    max_len: int = 2,
    cert_rate: float = 0.2,
) -> Formula:
    """A formula with about ``size`` connectives and atoms."""
    if size <= 1 or rng.random() < 0.25:
        if rng.random() < cert_rate:
            return Cert(rng.choice(vocab.keys), random_binding(rng, vocab, max_len))
        return Contains(random_expr(rng, vocab, max_len), random_expr(rng, vocab, max_len))
    if rng.random() < 0.35:
        return Not(random_formula(rng, vocab, size - 1, max_len, cert_rate))
    left = rng.randint(1, max(1, size - 2))
    return And(
        random_formula(rng, vocab, left, max_len, cert_rate),
        random_formula(rng, vocab, max(1, size - 1 - left), max_len, cert_rate),
    )


def extend_randomly(rng: random.Random, w: World, vocab: Vocabulary, extra: int = 4) -> World:
    """A world w' >= w with a few more certificates and global bindings."""
    beta = {g: {k for k in vocab.keys if rng.random() < 0.3} for g in vocab.globals}
    certs: dict[Key, set[Formula]] = {}
    for _ in range(rng.randint(0, extra)):
        certs.setdefault(rng.choice(vocab.keys), set()).add(random_binding(rng, vocab))
    return w.extend(beta, certs)


__all__ = [
    "Vocabulary",
    "extend_randomly",
    "random_binding",
    "random_expr",
    "random_formula",
    "random_world",
]
