"""Exhaustive model search over a small, explicitly given key set.

The open search treats each edge ``y in l(x, n)``, each membership
``y in beta(g)`` and each certificate atom of φ as a three-valued variable
(true, false, or not yet chosen).  Denotations get a lower bound (unchosen
variables false) and an upper bound (unchosen variables true); a
containment atom is decided once the bounds settle it.  Certificates
chosen true push the keys they force into the names they bind.  A branch
is cut as soon as φ is definitely false or a forced key lands on an edge
already chosen false.

The closed search is the same idea with the assignment fixed to the least
fixpoint of the world, so only certificates and global bindings are
chosen.  Besides the certificate atoms of φ it may add, for every key x,
local name n of φ and key y, a certificate ``n >= y . y ... y`` at x whose
body is longer than any expression in φ; such certificates bind n to y
without being mentioned by φ.
"""
from __future__ import annotations

from itertools import product
from typing import Optional

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
    LocalNameAssignment,
    Not,
    Self,
    World,
    chain,
    components,
    formula_exprs,
    formula_names,
    interpret,
    is_binding,
)
from ..semantics import holds, is_consistent, minimal_assignment
from .closure import evaluated_atoms
from .common import Budget, eval3


class _Open:
    def __init__(self, phi: Formula, keys: list[Key], budget: Budget):
        self.phi = phi
        self.keys = keys
        self.kidx = {k: i for i, k in enumerate(keys)}
        self.all = (1 << len(keys)) - 1
        names = formula_names(phi)
        self.locals = sorted(a for a in names if isinstance(a, LocalName))
        self.globals = sorted(a for a in names if isinstance(a, GlobalName))
        atoms = evaluated_atoms(phi)
        self.contains_atoms = [a for a in atoms if isinstance(a, Contains)]
        self.cert_atoms = [a for a in atoms if isinstance(a, Cert)]
        self.polarity: dict[Formula, set[bool]] = {}
        self._polarities(phi, True)
        self._pref = False
        self.budget = budget

    def _polarities(self, f: Formula, sign: bool) -> None:
        if isinstance(f, Contains):
            self.polarity.setdefault(f, set()).add(sign)
        elif isinstance(f, Not):
            self._polarities(f.body, not sign)
        elif isinstance(f, And):
            self._polarities(f.left, sign)
            self._polarities(f.right, sign)

    # state: (T, F, BT, BF, certs) with T/F dicts (x, n) -> mask, BT/BF dicts g -> mask,
    # certs dict atom -> bool
    def _eval(self, e: Expr, x: int, st, upper: bool, touched) -> int:
        if isinstance(e, Key):
            return 1 << self.kidx[e]
        if isinstance(e, Self):
            return 1 << x
        if isinstance(e, LocalName):
            T, F = st[0].get((x, e), 0), st[1].get((x, e), 0)
            unknown = self.all & ~T & ~F
            if unknown and touched is not None:
                touched.append(("l", x, e, unknown, self._pref))
            return (self.all & ~F) if upper else T
        if isinstance(e, GlobalName):
            T, F = st[2].get(e, 0), st[3].get(e, 0)
            unknown = self.all & ~T & ~F
            if unknown and touched is not None:
                touched.append(("b", None, e, unknown, self._pref))
            return (self.all & ~F) if upper else T
        out = 0
        left = self._eval(e.left, x, st, upper, touched)
        for y in range(len(self.keys)):
            if left >> y & 1:
                out |= self._eval(e.right, y, st, upper, touched)
        return out

    def _atom(self, a: Formula, v: int, st, touched) -> Optional[bool]:
        if isinstance(a, Cert):
            return st[4].get(a)
        lo_p = self._eval(a.sup, v, st, False, None)
        hi_q = self._eval(a.sub, v, st, True, None)
        if hi_q & ~lo_p == 0:
            return True
        lo_q = self._eval(a.sub, v, st, False, None)
        hi_p = self._eval(a.sup, v, st, True, None)
        if lo_q & ~hi_p:
            return False
        if touched is not None:
            # branch first toward the value the atom wants: a true atom
            # wants the left side large and the right side small
            pol = self.polarity.get(a, {True, False})
            want = next(iter(pol)) if len(pol) == 1 else None
            for e, grow in ((a.sup, want), (a.sub, None if want is None else not want)):
                self._pref = bool(grow)
                self._eval(e, v, st, True, touched)
                self._eval(e, v, st, False, touched)
        return None

    def _propagate(self, st) -> bool:
        T, F = st[0], st[1]
        changed = True
        while changed:
            changed = False
            for a in self.cert_atoms:
                if st[4].get(a) and is_binding(a.body):
                    k = self.kidx[a.issuer]
                    entry = (k, a.body.sup)
                    need = self._eval(a.body.sub, k, st, False, None)
                    if need & F.get(entry, 0):
                        return False
                    if need & ~T.get(entry, 0):
                        T[entry] = T.get(entry, 0) | need
                        changed = True
        return True

    def search(self) -> Optional[tuple[World, LocalNameAssignment, Key]]:
        for v in range(len(self.keys)):
            found = self._dfs(({}, {}, {}, {}, {}), v)
            if found is not None:
                return found
        return None

    def _copy(self, st):
        return tuple(dict(d) for d in st)

    def _dfs(self, st, v: int):
        self.budget.tick()
        if not self._propagate(st):
            return None
        touched: list = []
        value = eval3(self.phi, lambda a: self._atom(a, v, st, touched))
        if value is False:
            return None
        if value is True:
            return self._finish(st, v)
        for a in self.cert_atoms:
            if a not in st[4]:
                for choice in (False, True):
                    nxt = self._copy(st)
                    nxt[4][a] = choice
                    found = self._dfs(nxt, v)
                    if found is not None:
                        return found
                return None
        if not touched:
            raise AssertionError("undecided formula with no open variable")
        kind, x, name, unknown, pref = touched[0]
        y = (unknown & -unknown).bit_length() - 1
        for choice in (pref, not pref):
            nxt = self._copy(st)
            if kind == "l":
                d = nxt[1] if not choice else nxt[0]
                d[(x, name)] = d.get((x, name), 0) | (1 << y)
            else:
                d = nxt[3] if not choice else nxt[2]
                d[name] = d.get(name, 0) | (1 << y)
            found = self._dfs(nxt, v)
            if found is not None:
                return found
        return None

    def _finish(self, st, v: int):
        keys = self.keys
        bindings = {
            (keys[x], n): {keys[y] for y in range(len(keys)) if m >> y & 1} for (x, n), m in st[0].items()
        }
        beta = {g: {keys[y] for y in range(len(keys)) if m >> y & 1} for g, m in st[2].items()}
        certs: dict[Key, set[Formula]] = {}
        for a, on in st[4].items():
            if on:
                certs.setdefault(a.issuer, set()).add(a.body)
        w = World(beta, certs, frozenset(keys))
        l = LocalNameAssignment(bindings)
        if is_consistent(w, l) and holds(w, l, keys[v], self.phi):
            return w, l, keys[v]
        return None


def small_open_search(
    phi: Formula, keys: list[Key], budget: Budget
) -> Optional[tuple[World, LocalNameAssignment, Key]]:
    """An open-semantics model of phi using only the given keys, or None."""
    return _Open(phi, sorted(keys), budget).search()


# -- closed semantics -----------------------------------------------------


def _filler(y: Key, length: int) -> Expr:
    return chain([y] * length)


def closed_search(
    phi: Formula, keys: list[Key], budget: Budget
) -> Optional[tuple[World, Key]]:
    """A world over the given keys and viewpoint with phi true at the least assignment."""
    keys = sorted(keys)
    names = formula_names(phi)
    locals_ = sorted(a for a in names if isinstance(a, LocalName))
    globals_ = sorted(a for a in names if isinstance(a, GlobalName))
    atoms = evaluated_atoms(phi)
    cert_atoms = [a for a in atoms if isinstance(a, Cert)]
    longest = max((len(components(e)) for e in formula_exprs(phi)), default=1)
    extras = [
        (x, Contains(n, _filler(y, longest + 1)))
        for x, n, y in product(keys, locals_, keys)
    ]
    variables: list[tuple] = (
        [("cert", a.issuer, a.body, a) for a in cert_atoms]
        + [("beta", g, y, None) for g in globals_ for y in keys]
        + [("cert", x, body, None) for x, body in extras]
    )

    def world(choice: dict, default: bool) -> World:
        beta: dict[GlobalName, set[Key]] = {}
        certs: dict[Key, set[Formula]] = {}
        for var in variables:
            on = choice.get(var, default)
            if not on:
                continue
            if var[0] == "beta":
                beta.setdefault(var[1], set()).add(var[2])
            else:
                certs.setdefault(var[1], set()).add(var[2])
        return World(beta, certs, frozenset(keys))

    def dfs(choice: dict, v: Key):
        budget.tick()
        lo_w, hi_w = world(choice, False), world(choice, True)
        lo_l, hi_l = minimal_assignment(lo_w), minimal_assignment(hi_w)

        def atom(a: Formula) -> Optional[bool]:
            if isinstance(a, Cert):
                var = ("cert", a.issuer, a.body, a)
                return choice.get(var)
            lo_p = interpret(a.sup, lo_w, lo_l, v)
            hi_q = interpret(a.sub, hi_w, hi_l, v)
            if lo_p >= hi_q:
                return True
            if not interpret(a.sup, hi_w, hi_l, v) >= interpret(a.sub, lo_w, lo_l, v):
                return False
            return None

        value = eval3(phi, atom)
        if value is False:
            return None
        if value is True:
            w = lo_w
            return (w, v) if holds(w, lo_l, v, phi) else None
        for var in variables:
            if var not in choice:
                break
        else:
            raise AssertionError("undecided formula with every variable chosen")
        for on in (False, True):
            choice[var] = on
            found = dfs(choice, v)
            if found is not None:
                return found
            del choice[var]
        return None

    for v in keys:
        found = dfs({}, v)
        if found is not None:
            return found
    return None


__all__ = ["closed_search", "small_open_search"]
