"""Search budget and three-valued evaluation of a formula's propositional skeleton."""
from __future__ import annotations

import os
from typing import Callable, Optional

from ..core import Cert, Contains, Formula, Not

DEFAULT_BUDGET = 10_000_000


class ResourceLimit(RuntimeError):
    """The search visited more nodes than its budget allows."""


def default_budget() -> int:
    value = os.environ.get("NAMES_BUDGET")
    return int(value) if value else DEFAULT_BUDGET


class Budget:
    def __init__(self, limit: Optional[int] = None):
        self.limit = default_budget() if limit is None else limit
        self.used = 0

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise ResourceLimit(f"search budget of {self.limit} nodes exhausted")


def eval3(f: Formula, atom_value: Callable[[Formula], Optional[bool]]) -> Optional[bool]:
    """Kleene evaluation; atom_value returns None for an undecided atom."""
    if isinstance(f, (Contains, Cert)):
        return atom_value(f)
    if isinstance(f, Not):
        v = eval3(f.body, atom_value)
        return None if v is None else not v
    left = eval3(f.left, atom_value)
    if left is False:
        return False
    right = eval3(f.right, atom_value)
    if right is False:
        return False
    if left is True and right is True:
        return True
    return None


__all__ = ["DEFAULT_BUDGET", "Budget", "ResourceLimit", "default_budget", "eval3"]
