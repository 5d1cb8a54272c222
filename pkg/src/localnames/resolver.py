"""Name resolution in the style of SDSI's REF2 procedure.

REF2 is nondeterministic; its meaning is the set of keys it can return.
``ref2_all`` computes that set by tabled top-down search: answers for each
(viewpoint, local name) pair are memoized, a pair already being expanded
in the current pass contributes only what it has so far, and passes repeat
until no table grows.  Every answer is stamped with the time it was
found, so ``ref2_trace`` can rebuild a finite computation tree by only
following answers that are strictly older than the one being justified.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .core import (
    Compound,
    Contains,
    Expr,
    GlobalName,
    Key,
    LocalName,
    Self,
    World,
)
from .parser import render

INF = float("inf")


@dataclass(frozen=True)
class ComputationTree:
    result: Key
    viewpoint: Key
    expr: Expr
    rule: str  # key | self | global | local | compound
    children: tuple["ComputationTree", ...] = ()
    cert: Optional[Contains] = field(default=None, compare=True)

    @property
    def label(self) -> tuple[Key, Key, Expr]:
        return self.result, self.viewpoint, self.expr

    def height(self) -> int:
        return 1 + max((c.height() for c in self.children), default=0)

    def render(self, indent: int = 0) -> str:
        if self.rule == "local":
            note = f"cert {self.viewpoint}: {render(self.cert)}"
        elif self.rule == "compound":
            note = f"compound via {self.children[0].result}"
        else:
            note = self.rule
        line = f"{'  ' * indent}{self.result} ∈ REF2({self.viewpoint}, {render(self.expr)}) [{note}]"
        return "\n".join([line] + [c.render(indent + 1) for c in self.children])


class _Tables:
    def __init__(self, w: World):
        self.w = w
        self.by_name: dict[tuple[Key, LocalName], list[Contains]] = {}
        for k, n, p in w.bindings():
            self.by_name.setdefault((k, n), []).append(Contains(n, p))
        # (viewpoint, local) -> {answer: time found}
        self.answers: dict[tuple[Key, LocalName], dict[Key, int]] = {}
        self.clock = 0
        self.grew = False
        self.visited: set[tuple[Key, LocalName]] = set()

    def resolve(self, k: Key, e: Expr) -> set[Key]:
        if isinstance(e, Key):
            return {e}
        if isinstance(e, Self):
            return {k}
        if isinstance(e, GlobalName):
            return set(self.w.beta_of(e))
        if isinstance(e, LocalName):
            return self.local(k, e)
        out: set[Key] = set()
        for k2 in sorted(self.resolve(k, e.left)):
            out |= self.resolve(k2, e.right)
        return out

    def local(self, k: Key, n: LocalName) -> set[Key]:
        entry = (k, n)
        table = self.answers.setdefault(entry, {})
        if entry in self.visited:
            # in progress or already expanded in this pass
            return set(table)
        self.visited.add(entry)
        for cert in self.by_name.get(entry, ()):
            found = self.resolve(k, cert.sub)
            for z in sorted(found):
                if z not in table:
                    self.clock += 1
                    table[z] = self.clock
                    self.grew = True
        return set(table)

    def run(self, k: Key, e: Expr) -> set[Key]:
        while True:
            self.grew = False
            self.visited = set()
            out = self.resolve(k, e)
            if not self.grew:
                return out

    # answers restricted to those found before a given time
    def older(self, k: Key, e: Expr, limit: float) -> set[Key]:
        if isinstance(e, Key):
            return {e}
        if isinstance(e, Self):
            return {k}
        if isinstance(e, GlobalName):
            return set(self.w.beta_of(e))
        if isinstance(e, LocalName):
            return {z for z, t in self.answers.get((k, e), {}).items() if t < limit}
        out: set[Key] = set()
        for k2 in self.older(k, e.left, limit):
            out |= self.older(k2, e.right, limit)
        return out

    def derive(self, z: Key, k: Key, e: Expr, limit: float) -> Optional[ComputationTree]:
        if isinstance(e, Key):
            return ComputationTree(z, k, e, "key") if z == e else None
        if isinstance(e, Self):
            return ComputationTree(z, k, e, "self") if z == k else None
        if isinstance(e, GlobalName):
            return ComputationTree(z, k, e, "global") if z in self.w.beta_of(e) else None
        if isinstance(e, LocalName):
            t = self.answers.get((k, e), {}).get(z)
            if t is None or t >= limit:
                return None
            for cert in self.by_name.get((k, e), ()):
                sub = self.derive(z, k, cert.sub, t)
                if sub is not None:
                    return ComputationTree(z, k, e, "local", (sub,), cert)
            raise AssertionError(f"answer {z} for {(k, e)} has no older justification")
        for k2 in sorted(self.older(k, e.left, limit)):
            if z in self.older(k2, e.right, limit):
                left = self.derive(k2, k, e.left, limit)
                right = self.derive(z, k2, e.right, limit)
                if left is not None and right is not None:
                    return ComputationTree(z, k, e, "compound", (left, right))
        return None


def ref2_all(k: Key, w: World, e: Expr) -> frozenset[Key]:
    """Every key some run of REF2 can return for e at viewpoint k."""
    return frozenset(_Tables(w).run(k, e))


def ref2_trace(k: Key, w: World, e: Expr, target: Key) -> Optional[ComputationTree]:
    """One computation tree with root (target, k, e), or None when there is none."""
    tables = _Tables(w)
    if target not in tables.run(k, e):
        return None
    tree = tables.derive(target, k, e, INF)
    assert tree is not None, "resolved answer without a computation tree"
    return tree


def validate_tree(tree: ComputationTree, w: World) -> bool:
    """Check that every node satisfies exactly the condition for its kind."""
    e, z, k, kids = tree.expr, tree.result, tree.viewpoint, tree.children
    if isinstance(e, Key):
        ok = tree.rule == "key" and z == e and not kids
    elif isinstance(e, Self):
        ok = tree.rule == "self" and z == k and not kids
    elif isinstance(e, GlobalName):
        ok = tree.rule == "global" and z in w.beta_of(e) and not kids
    elif isinstance(e, LocalName):
        ok = (
            tree.rule == "local"
            and len(kids) == 1
            and kids[0].viewpoint == k
            and kids[0].result == z
            and tree.cert == Contains(e, kids[0].expr)
            and tree.cert in w.certs_of(k)
        )
    elif isinstance(e, Compound):
        ok = (
            tree.rule == "compound"
            and len(kids) == 2
            and kids[0].viewpoint == k
            and kids[0].expr == e.left
            and kids[1].viewpoint == kids[0].result
            and kids[1].expr == e.right
            and kids[1].result == z
        )
    else:
        ok = False
    return ok and all(validate_tree(c, w) for c in kids)
