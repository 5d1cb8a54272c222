"""Open and closed semantics.

``apply_step`` is the one-step binding operator T_w; ``minimal_assignment``
computes its least fixpoint l_w.  A formula holds under the open semantics
for a consistent assignment, and under the closed semantics at l_w.
"""
from __future__ import annotations

from collections import deque

from .core import (
    And,
    Cert,
    Contains,
    Expr,
    Formula,
    GlobalName,
    Key,
    LocalName,
    LocalNameAssignment,
    Not,
    Self,
    World,
    interpret,
)


class InconsistentAssignment(ValueError):
    """The assignment violates a certificate of the world, so it is not an admissible model."""


def apply_step(w: World, l: LocalNameAssignment) -> LocalNameAssignment:
    out: dict[tuple[Key, LocalName], set[Key]] = {}
    for k, n, p in w.bindings():
        out.setdefault((k, n), set()).update(interpret(p, w, l, k))
    return LocalNameAssignment(out)


def _eval_tracking(
    e: Expr,
    w: World,
    table: dict[tuple[Key, LocalName], set[Key]],
    k: Key,
    deps: set[tuple[Key, LocalName]],
) -> set[Key]:
    # interpret against a mutable table, recording which entries were read
    if isinstance(e, Key):
        return {e}
    if isinstance(e, LocalName):
        deps.add((k, e))
        return set(table.get((k, e), ()))
    if isinstance(e, GlobalName):
        return set(w.beta_of(e))
    if isinstance(e, Self):
        return {k}
    out: set[Key] = set()
    for k2 in _eval_tracking(e.left, w, table, k, deps):
        out |= _eval_tracking(e.right, w, table, k2, deps)
    return out


def minimal_assignment(w: World) -> LocalNameAssignment:
    """Least fixpoint of T_w, computed semi-naively.

    A binding is re-evaluated only when an entry it read has grown since
    its last evaluation.
    """
    bindings = list(w.bindings())
    table: dict[tuple[Key, LocalName], set[Key]] = {}
    readers: dict[tuple[Key, LocalName], set[int]] = {}
    queue = deque(range(len(bindings)))
    queued = set(queue)
    keys = w.declared_keys
    names = {n for _, n, _ in bindings}
    bound = len(keys) * len(names) * len(keys)
    growth = 0
    while queue:
        i = queue.popleft()
        queued.discard(i)
        k, n, p = bindings[i]
        deps: set[tuple[Key, LocalName]] = set()
        value = _eval_tracking(p, w, table, k, deps)
        for d in deps:
            readers.setdefault(d, set()).add(i)
        entry = table.setdefault((k, n), set())
        if value <= entry:
            continue
        entry |= value
        growth += 1
        assert growth <= bound, "fixpoint iteration exceeded its step bound"
        for j in sorted(readers.get((k, n), ())):
            if j not in queued:
                queued.add(j)
                queue.append(j)
    return LocalNameAssignment(table)


def is_consistent(w: World, l: LocalNameAssignment) -> bool:
    return all(interpret(p, w, l, k) <= l(k, n) for k, n, p in w.bindings())


def holds(w: World, l: LocalNameAssignment, k: Key, f: Formula) -> bool:
    if isinstance(f, Contains):
        return interpret(f.sup, w, l, k) >= interpret(f.sub, w, l, k)
    if isinstance(f, Cert):
        return f.body in w.certs_of(f.issuer)
    if isinstance(f, Not):
        return not holds(w, l, k, f.body)
    if isinstance(f, And):
        return holds(w, l, k, f.left) and holds(w, l, k, f.right)
    raise TypeError(f"not a formula: {f!r}")


def models_open(w: World, l: LocalNameAssignment, k: Key, f: Formula) -> bool:
    """Truth under the open semantics; raises InconsistentAssignment when l violates w."""
    if not is_consistent(w, l):
        raise InconsistentAssignment("the local name assignment is not consistent with the world")
    return holds(w, l, k, f)


def models_closed(w: World, k: Key, f: Formula, l_w: LocalNameAssignment | None = None) -> bool:
    """Truth at the minimal assignment; pass ``l_w`` to reuse a precomputed one."""
    return holds(w, minimal_assignment(w) if l_w is None else l_w, k, f)


__all__ = [
    "InconsistentAssignment",
    "apply_step",
    "holds",
    "is_consistent",
    "minimal_assignment",
    "models_closed",
    "models_open",
]
