"""Satisfiability and validity under the open semantics.

Two engines share the work.  The canonical-model search decides a formula
using a handful of fresh keys beyond those it mentions.  A model over a
finite universe is also a model over an unbounded one, so this search
settles finite questions too whenever the universe has enough spare keys.
When it does not, an exhaustive search over the whole finite universe
takes over; it is exact for any finite universe, only slower.  Every
model returned is re-checked with the model checker before it is
reported.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from ..core import UNBOUNDED, Formula, Key, KeyUniverse, LocalNameAssignment, Not, World, formula_keys
from ..parser import render_witness
from ..semantics import holds, is_consistent
from .canonical import PoolExhausted, canonical_search
from .closure import ClosureInfo, closure, formula_length
from .common import DEFAULT_BUDGET, Budget, ResourceLimit
from .smallworld import closed_search, small_open_search


@dataclass(frozen=True)
class Satisfiable:
    witness: World
    assignment: LocalNameAssignment
    viewpoint: Key

    def render(self) -> str:
        return render_witness(self.witness, self.assignment, self.viewpoint)


@dataclass(frozen=True)
class Unsatisfiable:
    pass


@dataclass(frozen=True)
class Valid:
    pass


@dataclass(frozen=True)
class Countermodel:
    """A world, consistent assignment and viewpoint at which the formula fails."""

    witness: World
    assignment: LocalNameAssignment
    viewpoint: Key

    def render(self) -> str:
        return render_witness(self.witness, self.assignment, self.viewpoint)


SatResult = Union[Satisfiable, Unsatisfiable]
ValidResult = Union[Valid, Countermodel]


def _budget(budget: Union[Budget, int, None]) -> Budget:
    return budget if isinstance(budget, Budget) else Budget(budget)


def satisfiable(f: Formula, u: KeyUniverse = UNBOUNDED, budget: Union[Budget, int, None] = None) -> SatResult:
    """Decide open-semantics satisfiability of f over the key universe u.

    Raises ResourceLimit when the search exceeds its node budget.
    """
    b = _budget(budget)
    keys = formula_keys(f)
    found: Optional[tuple[World, LocalNameAssignment, Key]]
    if u.is_finite:
        missing = keys - u.keys
        if missing:
            raise ValueError(f"keys outside the declared universe: {' '.join(map(str, sorted(missing)))}")
        # a finite model is also an unbounded one, so the canonical search
        # settles the question whenever the spare keys are enough for it,
        # and the direct search takes over when they are not
        try:
            found = canonical_search(f, u.fresh_pool(keys), b)
        except PoolExhausted:
            found = small_open_search(f, list(u.keys), b)
    else:
        found = canonical_search(f, u.fresh_pool(keys), b)
    if found is None:
        return Unsatisfiable()
    w, l, v = found
    assert is_consistent(w, l) and holds(w, l, v, f), "search returned an unverified model"
    return Satisfiable(w, l, v)


def valid_check(f: Formula, u: KeyUniverse = UNBOUNDED, budget: Union[Budget, int, None] = None) -> ValidResult:
    """Valid, or a countermodel at which f is false."""
    result = satisfiable(Not(f), u, budget)
    if isinstance(result, Unsatisfiable):
        return Valid()
    return Countermodel(result.witness, result.assignment, result.viewpoint)


__all__ = [
    "DEFAULT_BUDGET",
    "Budget",
    "ClosureInfo",
    "Countermodel",
    "PoolExhausted",
    "ResourceLimit",
    "SatResult",
    "Satisfiable",
    "Unsatisfiable",
    "Valid",
    "ValidResult",
    "closed_search",
    "closure",
    "formula_length",
    "satisfiable",
    "small_open_search",
    "valid_check",
]
