"""Names, principal expressions, formulas, worlds and local name assignments.

Keys, global names and local names live in disjoint namespaces: in concrete
syntax they are written ``#k``, ``!g`` and ``n``.  An expression is a key, a
global, a local, ``self``, or a compound ``p . q`` read as "p's q".  The
function :func:`interpret` gives the set of keys an expression denotes for a
viewpoint key, a world and a local name assignment.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


@dataclass(frozen=True, order=True)
class Key:
    id: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("key identifier must be non-empty")

    def __str__(self) -> str:
        return f"#{self.id}"


@dataclass(frozen=True, order=True)
class GlobalName:
    id: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("global name identifier must be non-empty")

    def __str__(self) -> str:
        return f"!{self.id}"


@dataclass(frozen=True, order=True)
class LocalName:
    id: str

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("local name identifier must be non-empty")
        if self.id == "self":
            raise ValueError("'self' is reserved and cannot be a local name")

    def __str__(self) -> str:
        return self.id


@dataclass(frozen=True)
class Self:
    """The current principal: denotes the viewpoint key."""

    def __str__(self) -> str:
        return "self"


SELF = Self()


@dataclass(frozen=True)
class Compound:
    """``left . right``, i.e. left's right."""

    left: "Expr"
    right: "Expr"

    def __str__(self) -> str:
        from .parser import render

        return render(self)


Name = Union[Key, GlobalName, LocalName, Self]
Expr = Union[Key, GlobalName, LocalName, Self, Compound]


@dataclass(frozen=True)
class Contains:
    """``sup >= sub``: every key bound to sub is bound to sup."""

    sup: Expr
    sub: Expr


@dataclass(frozen=True)
class Cert:
    """The issuer key has signed a certificate with the given body."""

    issuer: Key
    body: "Formula"

    def __post_init__(self) -> None:
        if not isinstance(self.issuer, Key):
            raise TypeError(f"only keys may certify a formula, got {self.issuer!r}")


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


Formula = Union[Contains, Cert, Not, And]

FALSE: Formula = Not(Contains(SELF, SELF))


def disjoin(a: Formula, b: Formula) -> Formula:
    return Not(And(Not(a), Not(b)))


def implies(a: Formula, b: Formula) -> Formula:
    # a => b is !(!!a & !b); the double negation keeps it distinct from an or
    return Not(And(Not(Not(a)), Not(b)))


def iff(a: Formula, b: Formula) -> Formula:
    return And(implies(a, b), implies(b, a))


def conjoin_all(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        return Not(FALSE)
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disjoin_all(fs: Iterable[Formula]) -> Formula:
    fs = list(fs)
    if not fs:
        return FALSE
    out = fs[0]
    for f in fs[1:]:
        out = disjoin(out, f)
    return out


# -- expression helpers --------------------------------------------------


def is_atomic(e: Expr) -> bool:
    return not isinstance(e, Compound)


def components(e: Expr) -> list[Name]:
    """The atoms of e from left to right, ignoring grouping."""
    out: list[Name] = []
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Compound):
            stack.append(x.right)
            stack.append(x.left)
        else:
            out.append(x)
    return out


def chain(parts: Iterable[Expr]) -> Expr:
    """Left fold of parts with the compound constructor."""
    it = iter(parts)
    try:
        out = next(it)
    except StopIteration:
        raise ValueError("cannot chain an empty sequence") from None
    for p in it:
        out = Compound(out, p)
    return out


def normalize_left(e: Expr) -> Expr:
    """The fully left-associated variant of e."""
    if not isinstance(e, Compound):
        return e
    return chain(components(e))


def expr_size(e: Expr) -> int:
    return len(components(e))


def expr_names(e: Expr) -> Iterator[Name]:
    yield from components(e)


def formula_exprs(f: Formula) -> Iterator[Expr]:
    """Every expression occurring in f, including inside certificate bodies."""
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Contains):
            yield g.sup
            yield g.sub
        elif isinstance(g, Cert):
            yield g.issuer
            stack.append(g.body)
        elif isinstance(g, Not):
            stack.append(g.body)
        else:
            stack.append(g.right)
            stack.append(g.left)


def formula_names(f: Formula) -> set[Name]:
    return {a for e in formula_exprs(f) for a in components(e)}


def formula_keys(f: Formula) -> set[Key]:
    return {a for a in formula_names(f) if isinstance(a, Key)}


def is_binding(f: Formula) -> bool:
    """True for certificate bodies of the form ``n >= p`` with n a local name."""
    return isinstance(f, Contains) and isinstance(f.sup, LocalName)


# -- assignments -----------------------------------------------------------


class LocalNameAssignment:
    """A finite map (key, local name) -> key set; unstored pairs denote the empty set."""

    __slots__ = ("_bindings",)

    def __init__(self, bindings: Mapping[tuple[Key, LocalName], Iterable[Key]] | None = None):
        self._bindings: dict[tuple[Key, LocalName], frozenset[Key]] = {}
        for kn, keys in (bindings or {}).items():
            keys = frozenset(keys)
            if keys:
                self._bindings[kn] = keys

    def __call__(self, k: Key, n: LocalName) -> frozenset[Key]:
        return self._bindings.get((k, n), frozenset())

    get = __call__

    def items(self) -> list[tuple[tuple[Key, LocalName], frozenset[Key]]]:
        return sorted(self._bindings.items())

    def keys(self) -> set[Key]:
        out = set()
        for (k, _), ks in self._bindings.items():
            out.add(k)
            out |= ks
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LocalNameAssignment):
            return NotImplemented
        return self._bindings == other._bindings

    def __hash__(self) -> int:
        return hash(frozenset(self._bindings.items()))

    def __le__(self, other: "LocalNameAssignment") -> bool:
        return all(ks <= other(*kn) for kn, ks in self._bindings.items())

    def __or__(self, other: "LocalNameAssignment") -> "LocalNameAssignment":
        merged = dict(self._bindings)
        for kn, ks in other._bindings.items():
            merged[kn] = merged.get(kn, frozenset()) | ks
        return LocalNameAssignment(merged)

    def __len__(self) -> int:
        return len(self._bindings)

    def __repr__(self) -> str:
        body = ", ".join(
            f"({k}, {n})->{{{', '.join(map(str, sorted(ks)))}}}" for (k, n), ks in self.items()
        )
        return f"LocalNameAssignment({body})"


EMPTY_ASSIGNMENT = LocalNameAssignment()


# -- worlds ----------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class World:
    """Global bindings, per-key certificate sets and the declared key slice.

    ``declared_keys`` is widened on construction to cover every key that
    occurs in ``beta`` or ``certs``.  Empty key and certificate sets are
    dropped.
    """

    beta: Mapping[GlobalName, frozenset[Key]] = field(default_factory=dict)
    certs: Mapping[Key, frozenset[Formula]] = field(default_factory=dict)
    declared_keys: frozenset[Key] = frozenset()

    def __post_init__(self) -> None:
        beta = {g: frozenset(ks) for g, ks in self.beta.items() if ks}
        certs = {k: frozenset(fs) for k, fs in self.certs.items() if fs}
        keys = set(self.declared_keys)
        for ks in beta.values():
            keys |= ks
        for k, fs in certs.items():
            keys.add(k)
            for f in fs:
                keys |= formula_keys(f)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "certs", certs)
        object.__setattr__(self, "declared_keys", frozenset(keys))

    __hash__ = None  # type: ignore[assignment]

    def beta_of(self, g: GlobalName) -> frozenset[Key]:
        return self.beta.get(g, frozenset())

    def certs_of(self, k: Key) -> frozenset[Formula]:
        return self.certs.get(k, frozenset())

    def bindings(self) -> Iterator[tuple[Key, LocalName, Expr]]:
        """Local-name binding certificates as (issuer, name, body expression), in a stable order."""
        cached = self.__dict__.get("_bindings")
        if cached is None:
            from .parser import render

            cached = [
                (k, f.sup, f.sub)
                for k in sorted(self.certs)
                for f in sorted(self.certs[k], key=render)
                if is_binding(f)
            ]
            object.__setattr__(self, "_bindings", cached)
        return iter(cached)

    def local_names(self) -> set[LocalName]:
        out = set()
        for fs in self.certs.values():
            for f in fs:
                out |= {a for a in formula_names(f) if isinstance(a, LocalName)}
        return out

    def with_keys(self, keys: Iterable[Key]) -> "World":
        return World(self.beta, self.certs, self.declared_keys | frozenset(keys))

    def with_certs(self, certs: Mapping[Key, Iterable[Formula]]) -> "World":
        """The same world with its certificate map replaced wholesale."""
        return World(self.beta, {k: frozenset(v) for k, v in certs.items()}, self.declared_keys)

    def extend(
        self,
        beta: Mapping[GlobalName, Iterable[Key]] | None = None,
        certs: Mapping[Key, Iterable[Formula]] | None = None,
    ) -> "World":
        """A world w' >= self with extra global bindings and certificates."""
        new_beta = dict(self.beta)
        for g, ks in (beta or {}).items():
            new_beta[g] = new_beta.get(g, frozenset()) | frozenset(ks)
        new_certs = dict(self.certs)
        for k, fs in (certs or {}).items():
            new_certs[k] = new_certs.get(k, frozenset()) | frozenset(fs)
        return World(new_beta, new_certs, self.declared_keys)

    def __le__(self, other: "World") -> bool:
        return all(ks <= other.beta_of(g) for g, ks in self.beta.items()) and all(
            fs <= other.certs_of(k) for k, fs in self.certs.items()
        )


EMPTY_WORLD = World()


# -- key universes ---------------------------------------------------------


@dataclass(frozen=True)
class KeyUniverse:
    """Either a finite declared key set or an unbounded supply of keys."""

    keys: frozenset[Key] | None = None

    @classmethod
    def finite(cls, keys: Iterable[Key]) -> "KeyUniverse":
        return cls(frozenset(keys))

    @classmethod
    def unbounded(cls) -> "KeyUniverse":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.keys is not None

    def fresh_pool(self, avoid: Iterable[Key]) -> Iterator[Key]:
        """Keys not in avoid, in a fixed order.

        Finite universes yield their own spare keys; unbounded ones
        generate ``#fresh1``, ``#fresh2``, ... skipping collisions.
        """
        avoid = set(avoid)
        if self.keys is not None:
            yield from (k for k in sorted(self.keys) if k not in avoid)
            return
        i = 0
        while True:
            i += 1
            k = Key(f"fresh{i}")
            if k not in avoid:
                yield k


UNBOUNDED = KeyUniverse.unbounded()


# -- interpretation --------------------------------------------------------


def interpret(e: Expr, w: World, l: LocalNameAssignment, k: Key) -> frozenset[Key]:
    """The key set denoted by e at viewpoint k in world w under assignment l."""
    if isinstance(e, Key):
        return frozenset((e,))
    if isinstance(e, LocalName):
        return l(k, e)
    if isinstance(e, GlobalName):
        return w.beta_of(e)
    if isinstance(e, Self):
        return frozenset((k,))
    out: set[Key] = set()
    for k2 in interpret(e.left, w, l, k):
        out |= interpret(e.right, w, l, k2)
    return frozenset(out)


def sorted_keys(keys: Iterable[Key]) -> list[Key]:
    return sorted(keys)


def format_keys(keys: Iterable[Key]) -> str:
    keys = sorted(keys)
    return " ".join(map(str, keys)) if keys else "(empty)"
