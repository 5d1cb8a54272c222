"""Satisfiability by canonical-model search.

Rather than enumerating worlds over a slice of 2|φ|² keys, this engine
guesses a *profile*: a truth value for every evaluated atom of φ and, for
every expression p in the expression closure P, whether p denotes the
empty set.  Each profile is closed under sound containment rules
(reflexivity, transitivity, left monotonicity, the globality rules, key
linking, the nonemptiness rules, key distinctness, and left-association),
with conflicts pruned as soon as they appear.  A complete, conflict-free
profile determines a model: empty expressions denote nothing,
expressions contained in a key denote that key, and each class of
mutually contained "open" expressions gets one fresh key of its own.

Every candidate model is checked against the original formula, so an
answer of "satisfiable" never rests on the construction being right.
Completeness rests on the completeness theorem for the axiom system: if a
consistent profile exists, the model built from it satisfies φ.

Expressions mentioning ``self`` are first simplified (``self.p`` and
``p.self`` are p).  If a bare ``self`` is left at an evaluated position,
the viewpoint is guessed among the keys of φ plus one fresh key, and
expressions are anchored to it so the rest of the search is
viewpoint-free.
"""
from __future__ import annotations

from typing import Iterator, Optional

from ..core import (
    Cert,
    Compound,
    Contains,
    Expr,
    Formula,
    GlobalName,
    Key,
    LocalName,
    LocalNameAssignment,
    Self,
    World,
    components,
    formula_keys,
    is_binding,
    normalize_left,
)
from ..semantics import holds, is_consistent
from .closure import anchor, drop_self, evaluated_atoms, map_atoms
from .common import Budget, eval3


class PoolExhausted(Exception):
    """A finite universe ran out of spare keys for the construction."""


def _bits(x: int) -> Iterator[int]:
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


class _Space:
    """The expression set P_1 and the static structure the rules consult."""

    def __init__(self, psi: Formula, k0: Key):
        self.k0 = k0
        atoms = evaluated_atoms(psi)
        self.contains_atoms = [a for a in atoms if isinstance(a, Contains)]
        self.cert_atoms = [a for a in atoms if isinstance(a, Cert)]

        order: list[Expr] = []
        seen: set[Expr] = set()

        def add(e: Expr) -> None:
            stack = [e]
            while stack:
                x = stack.pop()
                if x in seen:
                    continue
                assert not isinstance(x, Self), "self must be eliminated before building P"
                seen.add(x)
                order.append(x)
                stack.append(normalize_left(x))
                if isinstance(x, Compound):
                    stack += [x.right, x.left]

        self.cert_link: dict[Cert, tuple[Expr, Expr]] = {}
        for a in self.contains_atoms:
            add(a.sup)
            add(a.sub)
        for c in self.cert_atoms:
            if is_binding(c.body):
                lhs = Compound(c.issuer, c.body.sup)
                rhs = anchor(c.issuer, c.body.sub)
                self.cert_link[c] = (lhs, rhs)
                add(lhs)
                add(rhs)
        keys = [e for e in order if isinstance(e, Key)]
        names = [e for e in order if isinstance(e, LocalName)]
        for k in keys:
            for n in names:
                add(Compound(k, n))

        self.P = order
        self.nP = len(order)
        self.exprs: list[Expr] = order + [k0] + [Compound(p, k0) for p in order]
        self.index = {e: i for i, e in enumerate(self.exprs)}
        N = self.N = len(self.exprs)
        self.K0 = self.nP
        self.key_ids = [i for i, e in enumerate(self.exprs) if isinstance(e, Key)]
        self.key_mask = sum(1 << i for i in self.key_ids)
        self.p_key_ids = [i for i in self.key_ids if i < self.nP]
        self.p_key_mask = sum(1 << i for i in self.p_key_ids)
        self.is_key = [isinstance(e, Key) for e in self.exprs]

        # left / right of compounds in P_1
        self.left = [-1] * N
        self.right_of: list[Optional[Expr]] = [None] * N
        for i, e in enumerate(self.exprs):
            if isinstance(e, Compound):
                self.left[i] = self.index[e.left]
                self.right_of[i] = e.right
        # by_left[a]: (r, a.r) for compounds a.r in P_1
        self.by_left: list[list[tuple[Expr, int]]] = [[] for _ in range(N)]
        self.comp: dict[tuple[int, Expr], int] = {}
        for i in range(N):
            if self.left[i] >= 0:
                r = self.right_of[i]
                self.by_left[self.left[i]].append((r, i))
                self.comp[(self.left[i], r)] = i
        # ext[p]: (p.g, g) for g a key or global, p in P
        self.ext: list[list[tuple[int, int]]] = [[] for _ in range(self.nP)]
        for (a, r), i in self.comp.items():
            if a < self.nP and isinstance(r, (Key, GlobalName)):
                self.ext[a].append((i, self.index[r]))
        self.k0_of = [self.index[Compound(p, k0)] for p in order]

        # static facts: reflexivity, left association, converse of globality
        self.base_facts: list[tuple[int, int]] = []
        for i, e in enumerate(self.exprs):
            if isinstance(e, Compound):
                lv = self.index.get(normalize_left(e))
                if lv is not None and lv != i:
                    self.base_facts += [(i, lv), (lv, i)]
                if isinstance(e.right, (Key, GlobalName)):
                    self.base_facts.append((self.index[e.right], i))
        # key distinctness among keys of P
        self.base_negs = [(a, b) for a in self.p_key_ids for b in self.p_key_ids if a != b]
        self.order_by_size = sorted(range(self.nP), key=lambda i: (len(components(self.exprs[i])), i))


class _State:
    __slots__ = ("sp", "sup", "sub", "neg", "nonempty", "empty", "conflict", "queue")

    def __init__(self, sp: _Space):
        self.sp = sp
        N = sp.N
        self.sup = [1 << i for i in range(N)]
        self.sub = [1 << i for i in range(N)]
        self.neg = [0] * N
        self.nonempty = 0
        self.empty = 0
        self.conflict = False
        self.queue: list[tuple] = []

    def copy(self) -> "_State":
        s = _State.__new__(_State)
        s.sp = self.sp
        s.sup = self.sup[:]
        s.sub = self.sub[:]
        s.neg = self.neg[:]
        s.nonempty = self.nonempty
        s.empty = self.empty
        s.conflict = self.conflict
        s.queue = []
        return s

    # requests; call run() afterwards
    def fact(self, i: int, j: int) -> None:
        self.queue.append((0, i, j))

    def negative(self, i: int, j: int) -> None:
        self.queue.append((1, i, j))

    def set_nonempty(self, p: int) -> None:
        self.queue.append((2, p, 0))

    def set_empty(self, p: int) -> None:
        self.queue.append((3, p, 0))

    def run(self) -> bool:
        sp = self.sp
        q = self.queue
        sup, sub = self.sup, self.sub
        while q and not self.conflict:
            op, i, j = q.pop()
            if op == 0:
                if sup[i] >> j & 1:
                    continue
                b_mask = sup[j]
                for a in _bits(sub[i]):
                    nb = b_mask & ~sup[a]
                    if not nb:
                        continue
                    sup[a] |= nb
                    for b in _bits(nb):
                        sub[b] |= 1 << a
                        self._on_fact(a, b)
            elif op == 1:
                if sup[i] >> j & 1:
                    self.conflict = True
                    break
                self.neg[i] |= 1 << j
                if j < sp.nP:
                    q.append((2, j, 0))
            elif op == 2:
                bit = 1 << i
                if self.nonempty & bit:
                    continue
                if self.empty & bit:
                    self.conflict = True
                    break
                self.nonempty |= bit
                for e, g in sp.ext[i]:
                    q.append((0, e, g))
                for k in _bits(sub[i] & sp.key_mask):
                    q.append((0, i, k))
                if sp.left[i] >= 0:
                    q.append((2, sp.left[i], 0))
            else:
                bit = 1 << i
                if self.empty & bit:
                    continue
                if self.nonempty & bit:
                    self.conflict = True
                    break
                self.empty |= bit
                # an empty expression is contained in everything
                for x in range(sp.nP):
                    q.append((0, x, i))
        q.clear()
        return not self.conflict

    def _on_fact(self, a: int, b: int) -> None:
        sp = self.sp
        q = self.queue
        if self.neg[a] >> b & 1:
            self.conflict = True
            return
        for r, e in sp.by_left[a]:
            f = sp.comp.get((b, r))
            if f is not None:
                q.append((0, e, f))
        if sp.is_key[b]:
            if a < sp.nP:
                q.append((2, a, 0))
            la = sp.left[a]
            if 0 <= la < sp.nP:
                q.append((2, la, 0))
        if sp.is_key[a] and b < sp.nP and self.nonempty >> b & 1:
            q.append((0, b, a))


class KeyPool:
    """Fresh keys handed out in a fixed order and reusable across candidate models."""

    def __init__(self, supply: Iterator[Key]):
        self.supply = supply
        self.cache: list[Key] = []

    def keys(self, exclude: set[Key]) -> Iterator[Key]:
        i = 0
        while True:
            if i == len(self.cache):
                try:
                    self.cache.append(next(self.supply))
                except StopIteration:
                    raise PoolExhausted from None
            k = self.cache[i]
            i += 1
            if k not in exclude:
                yield k


class ProfileSearch:
    """Search over profiles of one formula without bare self at evaluated positions."""

    def __init__(self, psi: Formula, pool: KeyPool, reserved: set[Key], budget: Budget):
        self.psi = psi
        self.pool = pool
        self.budget = budget
        self.k0 = next(pool.keys(reserved))
        self.reserved = reserved | {self.k0}
        self.sp = _Space(psi, self.k0)
        self.atoms = evaluated_atoms(psi)
        self.assign: dict[Formula, bool] = {}

    def models(self) -> Iterator[tuple[World, LocalNameAssignment]]:
        """Candidate models, one per complete conflict-free profile."""
        st = _State(self.sp)
        for i, j in self.sp.base_facts:
            st.fact(i, j)
        for i, j in self.sp.base_negs:
            st.negative(i, j)
        if st.run():
            self.assign = {}
            yield from self._atoms(st, 0)

    def _atoms(self, st: _State, pos: int):
        self.budget.tick()
        if pos == len(self.atoms):
            yield from self._empties(st)
            return
        atom = self.atoms[pos]
        sp = self.sp
        choices = (True, False)
        if isinstance(atom, Contains):
            i, j = sp.index[atom.sup], sp.index[atom.sub]
            if st.sup[i] >> j & 1:
                choices = (True,)
            elif st.neg[i] >> j & 1:
                choices = (False,)
        for v in choices:
            self.assign[atom] = v
            if eval3(self.psi, self.assign.get) is not False:
                nxt = st.copy()
                if isinstance(atom, Contains):
                    (nxt.fact if v else nxt.negative)(i, j)
                elif v and atom in sp.cert_link:
                    lhs, rhs = sp.cert_link[atom]
                    nxt.fact(sp.index[lhs], sp.index[rhs])
                if nxt.run():
                    yield from self._atoms(nxt, pos + 1)
            del self.assign[atom]

    def _empties(self, st: _State):
        self.budget.tick()
        undecided = ~(st.nonempty | st.empty)
        for p in self.sp.order_by_size:
            if undecided >> p & 1:
                break
        else:
            yield self._build(st)
            return
        for make_empty in (True, False):
            nxt = st.copy()
            (nxt.set_empty if make_empty else nxt.set_nonempty)(p)
            if nxt.run():
                yield from self._empties(nxt)

    def _build(self, st: _State) -> tuple[World, LocalNameAssignment]:
        sp = self.sp
        sup, sub, exprs = st.sup, st.sub, sp.exprs
        # classify P: empty, key-equivalent (inside some key of P), or open
        open_mask = 0
        for p in range(sp.nP):
            if not (st.empty >> p & 1) and not (sub[p] & sp.p_key_mask):
                open_mask |= 1 << p
        classes: list[int] = []
        seen = 0
        for p in _bits(open_mask):
            if not (seen >> p & 1):
                cls = sup[p] & sub[p] & open_mask
                seen |= cls
                classes.append(cls)
        supply = self.pool.keys(self.reserved)
        class_keys = [next(supply) for _ in classes]

        def I(x: int) -> set[Key]:
            out = {exprs[k] for k in _bits(sup[x] & sp.key_mask)}
            out.update(kc for cls, kc in zip(classes, class_keys) if sup[x] & cls)
            return out

        bindings: dict[tuple[Key, LocalName], set[Key]] = {}
        beta: dict[GlobalName, set[Key]] = {}
        for x in range(sp.nP):
            e = exprs[x]
            if isinstance(e, LocalName):
                bindings.setdefault((sp.k0, e), set()).update(I(x))
            elif isinstance(e, GlobalName):
                beta[e] = I(x)
            elif isinstance(e, Compound) and isinstance(e.right, LocalName):
                a = sp.left[x]
                if isinstance(exprs[a], Key):
                    bindings.setdefault((exprs[a], e.right), set()).update(I(x))
                for cls, kc in zip(classes, class_keys):
                    if cls >> a & 1:
                        bindings.setdefault((kc, e.right), set()).update(I(x))
        certs: dict[Key, set[Formula]] = {}
        for atom in sp.cert_atoms:
            if self.assign.get(atom):
                certs.setdefault(atom.issuer, set()).add(atom.body)
        keys = formula_keys(self.psi) | {sp.k0} | set(class_keys)
        return World(beta, certs, frozenset(keys)), LocalNameAssignment(bindings)


def _strip(f: Formula) -> Formula:
    return map_atoms(f, lambda a: Contains(drop_self(a.sup), drop_self(a.sub)))


def _has_bare_self(f: Formula) -> bool:
    return any(
        isinstance(a, Contains) and (isinstance(a.sup, Self) or isinstance(a.sub, Self))
        for a in evaluated_atoms(f)
    )


def canonical_search(
    phi: Formula, fresh: Iterator[Key], budget: Budget
) -> Optional[tuple[World, LocalNameAssignment, Key]]:
    """A verified open-semantics model of phi, or None when phi is unsatisfiable.

    ``fresh`` supplies keys that do not occur in phi.  Raises
    PoolExhausted as soon as a profile needs more keys than it holds.
    """
    psi = _strip(phi)
    pool = KeyPool(fresh)

    def accept(w: World, l: LocalNameAssignment, v: Key) -> bool:
        budget.tick()
        return is_consistent(w, l) and holds(w, l, v, phi)

    if not _has_bare_self(psi):
        search = ProfileSearch(psi, pool, set(), budget)
        for w, l in search.models():
            if accept(w, l, search.k0):
                return w, l, search.k0
        return None

    k_star = next(pool.keys(set()))
    for v in sorted(formula_keys(phi)) + [k_star]:
        anchored = map_atoms(psi, lambda a: Contains(anchor(v, a.sup), anchor(v, a.sub)))
        search = ProfileSearch(anchored, pool, {k_star}, budget)
        for w, l in search.models():
            w = w.with_keys([v])
            if accept(w, l, v):
                return w, l, v
    return None
