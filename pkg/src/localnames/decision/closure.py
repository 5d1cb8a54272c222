"""Syntactic bookkeeping for the decision procedure."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..core import (
    And,
    Cert,
    Compound,
    Contains,
    Expr,
    Formula,
    GlobalName,
    Key,
    LocalName,
    Not,
    Self,
    components,
    formula_names,
    is_binding,
)


@dataclass(frozen=True)
class ClosureInfo:
    subformulas: frozenset[Formula]
    keys_of: frozenset[Key]
    locals_of: frozenset[LocalName]
    globals_of: frozenset[GlobalName]
    cert_candidates: dict[Key, frozenset[Contains]] = field(hash=False)
    length: int

    @property
    def bound(self) -> int:
        """Size of key slice that always suffices for a model."""
        return 2 * self.length * self.length


def formula_length(f: Formula) -> int:
    """Symbol count: every name occurrence and every connective counts one.

    The dot of a compound expression is not counted.
    """
    if isinstance(f, Contains):
        return 1 + len(components(f.sup)) + len(components(f.sub))
    if isinstance(f, Cert):
        return 2 + formula_length(f.body)
    if isinstance(f, Not):
        return 1 + formula_length(f.body)
    return 1 + formula_length(f.left) + formula_length(f.right)


def subformulas(f: Formula) -> set[Formula]:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        if isinstance(g, (Cert, Not)):
            stack.append(g.body)
        elif isinstance(g, And):
            stack += [g.left, g.right]
    return out


def closure(f: Formula) -> ClosureInfo:
    subs = subformulas(f)
    names = formula_names(f)
    certs: dict[Key, set[Contains]] = {}
    for g in subs:
        if isinstance(g, Cert) and is_binding(g.body):
            certs.setdefault(g.issuer, set()).add(g.body)
    return ClosureInfo(
        subformulas=frozenset(subs),
        keys_of=frozenset(a for a in names if isinstance(a, Key)),
        locals_of=frozenset(a for a in names if isinstance(a, LocalName)),
        globals_of=frozenset(a for a in names if isinstance(a, GlobalName)),
        cert_candidates={k: frozenset(v) for k, v in certs.items()},
        length=formula_length(f),
    )


def evaluated_atoms(f: Formula) -> list[Formula]:
    """Containment and certificate atoms outside certificate bodies, first occurrence first."""
    out: list[Formula] = []
    seen = set()

    def walk(g: Formula) -> None:
        if isinstance(g, (Contains, Cert)):
            if g not in seen:
                seen.add(g)
                out.append(g)
        elif isinstance(g, Not):
            walk(g.body)
        else:
            walk(g.left)
            walk(g.right)

    walk(f)
    return out


def map_atoms(f: Formula, fn) -> Formula:
    """Rebuild f with every evaluated containment atom replaced by fn(atom)."""
    if isinstance(f, Contains):
        return fn(f)
    if isinstance(f, Cert):
        return f
    if isinstance(f, Not):
        return Not(map_atoms(f.body, fn))
    return And(map_atoms(f.left, fn), map_atoms(f.right, fn))


def drop_self(e: Expr) -> Expr:
    """Remove self inside compounds: self.p and p.self both denote p."""
    if not isinstance(e, Compound):
        return e
    left, right = drop_self(e.left), drop_self(e.right)
    if isinstance(left, Self):
        return right
    if isinstance(right, Self):
        return left
    return Compound(left, right)


def anchor(k: Key, e: Expr) -> Expr:
    """An expression without self denoting what e denotes at viewpoint k, at any viewpoint."""
    e = drop_self(e)
    if isinstance(e, Self):
        return k
    if isinstance(components(e)[0], (Key, GlobalName)):
        # already viewpoint independent
        return e
    return Compound(k, e)


def mentions_self(e: Expr) -> bool:
    return any(isinstance(a, Self) for a in components(e))


__all__ = [
    "ClosureInfo",
    "anchor",
    "closure",
    "drop_self",
    "evaluated_atoms",
    "formula_length",
    "map_atoms",
    "mentions_self",
    "subformulas",
]
