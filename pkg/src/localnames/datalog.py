"""Worlds as definite Horn programs over a ternary predicate ``name``.

``name(x, p, y)`` reads "y is in the denotation of p at x".  A world becomes
identity facts for keys, facts for global bindings, one rule per local name
binding certificate, and ``name(k, self, k)`` facts.  The minimal model is
computed bottom-up with semi-naive evaluation, and a principal expression
turns into a conjunctive query whose answers are its denotation.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count
from typing import Iterable, Iterator, Sequence, Union

from .core import (
    SELF,
    Compound,
    Expr,
    GlobalName,
    Key,
    LocalName,
    Name,
    Self,
    World,
)


@dataclass(frozen=True, order=True)
class Var:
    name: str

    def __post_init__(self) -> None:
        if not self.name or not (self.name[0].isupper() or self.name[0] == "_"):
            raise ValueError(f"variable names start with an uppercase letter: {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const:
    value: Name

    def __str__(self) -> str:
        return str(self.value)


Term = Union[Var, Const]


@dataclass(frozen=True)
class Atom:
    args: tuple[Term, Term, Term]
    predicate: str = "name"
    negated: bool = False

    def __post_init__(self) -> None:
        if len(self.args) != 3:
            raise ValueError("name atoms have exactly three arguments")

    def variables(self) -> set[Var]:
        return {t for t in self.args if isinstance(t, Var)}

    def is_ground(self) -> bool:
        return not self.variables()

    def __str__(self) -> str:
        text = f"{self.predicate}({', '.join(map(str, self.args))})"
        return f"not {text}" if self.negated else text


def name_atom(x: Term, y: Term, z: Term) -> Atom:
    return Atom((x, y, z))


@dataclass(frozen=True)
class HornClause:
    head: Atom
    body: tuple[Atom, ...] = ()

    def __post_init__(self) -> None:
        bound = set().union(*(a.variables() for a in self.body)) if self.body else set()
        if not self.head.variables() <= bound:
            raise ValueError(f"head variables of {self.head} do not occur in the body")

    @property
    def is_fact(self) -> bool:
        return not self.body


Fact = tuple[Name, Name, Name]


class FactSet:
    """A finite set of ground ``name`` atoms, stored as value triples."""

    def __init__(self, facts: Iterable[Fact] = ()):
        self.facts: frozenset[Fact] = frozenset(facts)

    def __contains__(self, item: Union[Fact, Atom]) -> bool:
        if isinstance(item, Atom):
            if not item.is_ground():
                return False
            item = tuple(t.value for t in item.args)  # type: ignore[union-attr]
        return item in self.facts

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.facts)

    def __len__(self) -> int:
        return len(self.facts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FactSet) and self.facts == other.facts

    def __hash__(self) -> int:
        return hash(self.facts)

    def atoms(self) -> list[Atom]:
        return sorted(
            (Atom(tuple(Const(v) for v in f)) for f in self.facts),  # type: ignore[arg-type]
            key=str,
        )


# -- translation -----------------------------------------------------------


def expr_to_query(e: Expr, x: Term, y: Term, fresh: Iterator[int] | None = None) -> list[Atom]:
    """Conjunctive query saying y is in the denotation of e at x.

    Intermediate variables are Z1, Z2, ... numbered left to right.
    """
    if x == y:
        raise ValueError("the two query endpoints must be distinct terms")
    atoms = _translate(e, x, y, count())
    # number the intermediate variables by first appearance
    fresh = fresh if fresh is not None else count(1)
    names: dict[Var, Var] = {}
    out = []
    for a in atoms:
        args = []
        for t in a.args:
            if isinstance(t, Var) and t.name.startswith("_"):
                if t not in names:
                    names[t] = Var(f"Z{next(fresh)}")
                t = names[t]
            args.append(t)
        out.append(Atom(tuple(args)))  # type: ignore[arg-type]
    return out


def _translate(e: Expr, x: Term, y: Term, fresh: Iterator[int]) -> list[Atom]:
    if not isinstance(e, Compound):
        return [name_atom(x, Const(e), y)]
    z = Var(f"_{next(fresh)}")
    return _translate(e.left, x, z, fresh) + _translate(e.right, z, y, fresh)


def world_to_program(w: World) -> list[HornClause]:
    universe = sorted(w.declared_keys)
    prog: list[HornClause] = []
    for k1 in universe:
        for k2 in universe:
            prog.append(HornClause(name_atom(Const(k1), Const(k2), Const(k2))))
    for g in sorted(w.beta):
        for k1 in universe:
            for k2 in sorted(w.beta[g]):
                prog.append(HornClause(name_atom(Const(k1), Const(g), Const(k2))))
    y = Var("Y")
    for k, n, p in w.bindings():
        body = expr_to_query(p, Const(k), y)
        prog.append(HornClause(name_atom(Const(k), Const(n), y), tuple(body)))
    for k in universe:
        prog.append(HornClause(name_atom(Const(k), Const(SELF), Const(k))))
    return prog


# -- evaluation ------------------------------------------------------------


class _Relation:
    """Triples with lazily built indexes on bound argument positions."""

    def __init__(self) -> None:
        self.rows: set[Fact] = set()
        self._index: dict[tuple[int, ...], dict[tuple, list[Fact]]] = {}

    def add(self, row: Fact) -> bool:
        if row in self.rows:
            return False
        self.rows.add(row)
        for cols, idx in self._index.items():
            idx.setdefault(tuple(row[c] for c in cols), []).append(row)
        return True

    def lookup(self, cols: tuple[int, ...], values: tuple) -> Sequence[Fact]:
        if not cols:
            return list(self.rows)
        if len(cols) == 3:
            return [values] if values in self.rows else []
        idx = self._index.get(cols)
        if idx is None:
            idx = {}
            for row in self.rows:
                idx.setdefault(tuple(row[c] for c in cols), []).append(row)
            self._index[cols] = idx
        return idx.get(values, ())

    def __len__(self) -> int:
        return len(self.rows)


def _match(atom: Atom, rel: _Relation, env: dict[Var, Name]) -> Iterator[dict[Var, Name]]:
    cols, values = [], []
    for i, t in enumerate(atom.args):
        if isinstance(t, Const):
            cols.append(i)
            values.append(t.value)
        elif t in env:
            cols.append(i)
            values.append(env[t])
    for row in rel.lookup(tuple(cols), tuple(values)):
        out = env
        ok = True
        for t, v in zip(atom.args, row):
            if isinstance(t, Var):
                if out is env:
                    out = dict(env)
                seen = out.get(t)
                if seen is None:
                    out[t] = v
                elif seen != v:
                    ok = False
                    break
        if ok:
            yield out


def _join(atoms: Sequence[Atom], rels: Sequence[_Relation], env: dict[Var, Name]) -> Iterator[dict[Var, Name]]:
    if not atoms:
        yield env
        return
    for env2 in _match(atoms[0], rels[0], env):
        yield from _join(atoms[1:], rels[1:], env2)


def _ground(atom: Atom, env: dict[Var, Name]) -> Fact:
    return tuple(t.value if isinstance(t, Const) else env[t] for t in atom.args)  # type: ignore[return-value]


def minimal_model(prog: Sequence[HornClause]) -> FactSet:
    """Least Herbrand model by semi-naive evaluation.

    In each round a rule fires once per body position, with that position
    reading only last round's new facts, earlier positions reading facts
    older than last round and later positions reading everything.
    """
    full = _Relation()
    delta = _Relation()
    rules = []
    for clause in prog:
        if clause.is_fact:
            if not clause.head.is_ground():
                raise ValueError(f"fact {clause.head} is not ground")
            if full.add(_ground(clause.head, {})):
                delta.add(_ground(clause.head, {}))
        else:
            rules.append(clause)
    old = _Relation()
    while len(delta):
        new = _Relation()
        for rule in rules:
            body = rule.body
            for j in range(len(body)):
                rels = [old] * j + [delta] + [full] * (len(body) - j - 1)
                for env in _join(body, rels, {}):
                    row = _ground(rule.head, env)
                    if row not in full.rows:
                        new.add(row)
        for row in delta.rows:
            old.add(row)
        for row in new.rows:
            full.add(row)
        delta = new
    return FactSet(full.rows)


def answer_query(m: FactSet, q: Sequence[Atom]) -> list[dict[str, Name]]:
    """All substitutions for the query's variables that put every atom in m.

    Atoms are joined most-selective first; results are sorted and
    duplicate-free.
    """
    if not q:
        raise ValueError("query must contain at least one atom")
    if any(a.negated for a in q):
        raise ValueError("negated atoms are not supported in queries")
    rel = _Relation()
    for f in m:
        rel.add(f)
    order = _plan(list(q), rel)
    variables = sorted(set().union(*(a.variables() for a in q)))
    seen = set()
    out = []
    for env in _join(order, [rel] * len(order), {}):
        row = tuple(env[v] for v in variables)
        if row not in seen:
            seen.add(row)
            out.append({v.name: env[v] for v in variables})
    out.sort(key=lambda s: [str(s[v.name]) for v in variables])
    return out


def _plan(atoms: list[Atom], rel: _Relation) -> list[Atom]:
    # greedy: cheapest atom next, counting rows that match its constants and
    # discounting for columns already bound by earlier atoms
    bound: set[Var] = set()
    order = []

    def cost(a: Atom) -> float:
        cols = tuple(i for i, t in enumerate(a.args) if isinstance(t, Const))
        rows = len(rel.lookup(cols, tuple(a.args[i].value for i in cols)))  # type: ignore[union-attr]
        joined = sum(1 for t in a.args if isinstance(t, Var) and t in bound)
        return rows / (1 + joined)

    while atoms:
        best = min(range(len(atoms)), key=lambda i: (cost(atoms[i]), i))
        a = atoms.pop(best)
        order.append(a)
        bound |= a.variables()
    return order


def decode(m: FactSet):
    """Split a model into identity facts, global bindings and local bindings."""
    identity, beta, local = set(), {}, {}
    for x, y, z in m:
        if isinstance(y, Key):
            identity.add((x, y, z))
        elif isinstance(y, GlobalName):
            beta.setdefault(y, {}).setdefault(x, set()).add(z)
        elif isinstance(y, LocalName):
            local.setdefault((x, y), set()).add(z)
    return identity, beta, local


# -- text ------------------------------------------------------------------

_BARE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def _const_names(prog: Sequence[HornClause]) -> dict[Name, str]:
    values: set[Name] = set()
    for clause in prog:
        for a in (clause.head, *clause.body):
            values |= {t.value for t in a.args if isinstance(t, Const)}
    bare: dict[str, list[Name]] = {}
    for v in values:
        bare.setdefault(v.id if not isinstance(v, Self) else "self", []).append(v)
    out = {}
    for v in values:
        ident = "self" if isinstance(v, Self) else v.id
        clash = len(bare[ident]) > 1 or (ident == "self" and not isinstance(v, Self))
        if _BARE.match(ident) and not clash:
            out[v] = ident
        else:
            out[v] = "'" + str(v).replace("'", "\\'") + "'"
    return out


def emit_program(prog: Sequence[HornClause]) -> str:
    """Plain Datalog text: sorted facts, then rules in certificate order."""
    names = _const_names(prog)

    def term(t: Term) -> str:
        return names[t.value] if isinstance(t, Const) else t.name

    def atom(a: Atom) -> str:
        return f"{a.predicate}({', '.join(term(t) for t in a.args)})"

    facts = sorted(atom(c.head) + "." for c in prog if c.is_fact)
    rules = [f"{atom(c.head)} :- {', '.join(atom(b) for b in c.body)}." for c in prog if not c.is_fact]
    return "\n".join(facts + rules) + "\n"


def parse_query(text: str) -> list[Atom]:
    """Parse ``name(X, lampson, #k1), name(...)``; uppercase identifiers are variables."""
    from .parser import ErrorKind, ParseError, _Parser, tokenize

    p = _Parser(tokenize(text))
    atoms = []
    while True:
        negated = False
        if p.at("!") or p.at("not"):
            p.advance()
            negated = True
        t = p.tok
        if not (t.kind == "ident" and t.text == "name"):
            p.fail(f"expected a name(...) atom, found {t.text or 'end of input'!r}")
        p.advance()
        p.expect("(")
        args = []
        for i in range(3):
            if i:
                p.expect(",")
            t = p.tok
            if t.kind == "ident" and t.text[0].isupper():
                p.advance()
                args.append(Var(t.text))
            else:
                e = p.atom()
                if isinstance(e, Compound):
                    raise ParseError(t.span, ErrorKind.UNEXPECTED_TOKEN, "query arguments are simple names")
                args.append(Const(e))
        p.expect(")")
        atoms.append(Atom(tuple(args), negated=negated))  # type: ignore[arg-type]
        if p.at(",") or p.at("&"):
            p.advance()
            continue
        p.expect_eof()
        return atoms
