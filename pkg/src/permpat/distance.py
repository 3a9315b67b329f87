"""Distance of a sequence to pattern-freeness.

Deleting entries and overwriting entries cost the same here: any deletion
set can be turned into the same number of value modifications (see
:func:`deletion_set_to_modifications`), so the exact deletion distance is
also the Hamming distance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from permpat.pattern import (
    _find_small0,
    _iter_copies0,
    _values,
    as_pattern,
    max_disjoint_copies_greedy,
)


class SearchBudgetExceeded(RuntimeError):
    """The exact search visited more nodes than its budget allowed."""


@dataclass(frozen=True)
class DistanceReport:
    lower: int
    upper: int
    exact: Optional[int] = None

    def __post_init__(self):
        if self.exact is not None and not self.lower <= self.exact <= self.upper:
            raise ValueError(f"inconsistent report {self}")


def distance_bounds(f, pi, *, exact: bool = False, budget: Optional[int] = None) -> DistanceReport:
    """Bounds from a maximal disjoint packing: each packed copy costs at least
    one deletion, and deleting every packed entry leaves no copy."""
    pi = as_pattern(pi)
    packing = max_disjoint_copies_greedy(f, pi)
    lower, upper = len(packing), pi.k * len(packing)
    value = None
    if exact or lower == 0:
        value = deletion_distance_exact(f, pi, budget=budget) if lower else 0
    return DistanceReport(lower, upper, value)


def _some_copy(vals, pi):
    if pi.k <= 3:
        return _find_small0(vals, pi)
    return next(_iter_copies0(vals, pi), None)


def _packing_size(vals: list[float], alive: list[int], pi) -> int:
    count = 0
    while True:
        sub = [vals[i] for i in alive]
        hit = _some_copy(sub, pi)
        if hit is None:
            return count
        count += 1
        drop = set(hit)
        alive = [p for j, p in enumerate(alive) if j not in drop]


def minimum_deletion_set(f, pi, budget: Optional[int] = None) -> frozenset[int]:
    """A minimum set of 1-indexed positions whose deletion leaves ``f`` free
    of ``pi``. Branch and bound over hitting sets: take any remaining copy and
    branch on deleting each of its entries; a disjoint packing of what is left
    bounds the remaining cost from below. ``budget`` caps the node count."""
    pi = as_pattern(pi)
    vals = _values(f)
    alive0 = list(range(len(vals)))
    root_lb = _packing_size(vals, alive0, pi)
    if root_lb == 0:
        return frozenset()
    best = [len(vals) + 1, None]
    nodes = [0]

    def rec(alive: list[int], deleted: list[int]) -> bool:
        nodes[0] += 1
        if budget is not None and nodes[0] > budget:
            raise SearchBudgetExceeded(f"more than {budget} search nodes")
        lb = _packing_size(vals, alive, pi)
        if len(deleted) + lb >= best[0]:
            return False
        sub = [vals[i] for i in alive]
        hit = _some_copy(sub, pi)
        if hit is None:
            best[0], best[1] = len(deleted), list(deleted)
            return best[0] == root_lb
        for j in hit:
            pos = alive[j]
            rest = alive[:j] + alive[j + 1 :]
            if rec(rest, deleted + [pos]):
                return True
        return False

    rec(alive0, [])
    return frozenset(i + 1 for i in best[1])


def deletion_distance_exact(f, pi, budget: Optional[int] = None) -> int:
    """Minimum number of deletions (equivalently modifications) making ``f``
    free of ``pi``. Intended for n up to about 40.

    Raises :class:`SearchBudgetExceeded` instead of returning a guess."""
    return len(minimum_deletion_set(f, pi, budget))


def deletion_set_to_modifications(f, S: Iterable[int]) -> list[float]:
    """Overwrite the entries in ``S`` (1-indexed) one at a time with the value
    of an adjacent entry outside the pending set, preferring the left one."""
    vals = _values(f)
    n = len(vals)
    pending = set(S)
    if any(not 1 <= x <= n for x in pending):
        raise ValueError("positions out of range")
    if n and len(pending) == n:
        raise ValueError("at least one entry must survive")
    while pending:
        for x in sorted(pending):
            left, right = x - 1, x + 1
            if left >= 1 and left not in pending:
                vals[x - 1] = vals[left - 1]
                break
            if right <= n and right not in pending:
                vals[x - 1] = vals[right - 1]
                break
        pending.discard(x)
    return vals


def is_far(f, pi, eps: float) -> bool:
    """Exact check that at least eps*n modifications are needed (small n)."""
    return deletion_distance_exact(f, pi) >= eps * len(f)


__all__ = [
    "DistanceReport",
    "SearchBudgetExceeded",
    "deletion_distance_exact",
    "deletion_set_to_modifications",
    "distance_bounds",
    "is_far",
    "minimum_deletion_set",
]
