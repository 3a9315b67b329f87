"""Permutations, sequences and pattern-copy search.

A copy of a pattern ``pi`` (length k) in a sequence ``f`` is a strictly
increasing k-tuple of 1-indexed positions whose values are order-isomorphic
to ``pi``. All comparisons are strict, so equal values never realize two
different pattern ranks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

Copy = tuple[int, ...]

SYMMETRIES = ("reverse", "complement", "inverse")


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1..k} in one-line notation."""

    values: tuple[int, ...]

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ValueError("permutation must have length >= 1")
        if sorted(vals) != list(range(1, len(vals) + 1)):
            raise ValueError(f"{vals} is not a permutation of 1..{len(vals)}")

    @classmethod
    def parse(cls, text: str) -> "Permutation":
        """Parse the literal form ``"1,3,2"``."""
        parts = [p.strip() for p in text.strip().strip("()").split(",")]
        if not parts or any(not p for p in parts):
            raise ValueError(f"bad permutation literal: {text!r}")
        try:
            return cls(tuple(int(p) for p in parts))
        except ValueError as exc:
            raise ValueError(f"bad permutation literal: {text!r}") from exc

    @classmethod
    def identity(cls, k: int) -> "Permutation":
        return cls(tuple(range(1, k + 1)))

    @property
    def k(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, i: int) -> int:
        """1-indexed access: ``pi[1]`` is the first entry."""
        if not 1 <= i <= len(self.values):
            raise IndexError(i)
        return self.values[i - 1]

    def position(self, value: int) -> int:
        """1-indexed position of ``value`` (the inverse permutation)."""
        return self.values.index(value) + 1

    def inverse(self) -> "Permutation":
        inv = [0] * self.k
        for pos, v in enumerate(self.values, start=1):
            inv[v - 1] = pos
        return Permutation(tuple(inv))

    def is_monotone(self) -> bool:
        k = self.k
        return self.values in (tuple(range(1, k + 1)), tuple(range(k, 0, -1)))

    def __str__(self) -> str:
        return ",".join(map(str, self.values))


def as_pattern(pi) -> Permutation:
    if isinstance(pi, Permutation):
        return pi
    if isinstance(pi, str):
        return Permutation.parse(pi)
    return Permutation(tuple(pi))


def as_sequence(values: Iterable[float]) -> tuple[float, ...]:
    """Validate and freeze a sequence; rejects NaN and infinities."""
    out = tuple(float(v) for v in values)
    for i, v in enumerate(out, start=1):
        if not math.isfinite(v):
            raise ValueError(f"entry {i} is not finite: {v}")
    return out


def _values(f) -> list[float]:
    if isinstance(f, np.ndarray):
        return f.astype(float).tolist()
    return [float(v) for v in f]


def order_isomorphic(x: Sequence[float], y: Sequence[float]) -> bool:
    if len(x) != len(y):
        return False
    n = len(x)
    for i in range(n):
        for j in range(n):
            if i != j and (x[i] < x[j]) != (y[i] < y[j]):
                return False
    return True


def symmetry(pi, which: str) -> Permutation:
    pi = as_pattern(pi)
    k = pi.k
    if which == "reverse":
        return Permutation(pi.values[::-1])
    if which == "complement":
        return Permutation(tuple(k + 1 - v for v in pi.values))
    if which == "inverse":
        return pi.inverse()
    raise ValueError(f"unknown symmetry {which!r}; expected one of {SYMMETRIES}")


def is_copy(f, pi, positions: Sequence[int]) -> bool:
    """Check that 1-indexed ``positions`` form a copy of ``pi`` in ``f``."""
    pi = as_pattern(pi)
    if len(positions) != pi.k:
        return False
    if any(b <= a for a, b in zip(positions, positions[1:])):
        return False
    if positions and (positions[0] < 1 or positions[-1] > len(f)):
        return False
    return order_isomorphic([f[p - 1] for p in positions], pi.values)


# ---------------------------------------------------------------------------
# generic depth-first search


def _search_plan(pi: Permutation) -> list[tuple[int, int]]:
    """For each pattern index d, the earlier indices holding the nearest lower
    and nearest higher pattern value (-1 when absent)."""
    plan = []
    vals = pi.values
    for d in range(pi.k):
        lo, hi = -1, -1
        for e in range(d):
            if vals[e] < vals[d] and (lo < 0 or vals[e] > vals[lo]):
                lo = e
            if vals[e] > vals[d] and (hi < 0 or vals[e] < vals[hi]):
                hi = e
        plan.append((lo, hi))
    return plan


def _iter_copies0(vals: list[float], pi: Permutation) -> Iterator[tuple[int, ...]]:
    """Yield 0-indexed copies in lexicographic order."""
    n, k = len(vals), pi.k
    if n < k:
        return
    plan = _search_plan(pi)
    idx = [0] * k
    inf = math.inf

    def rec(d: int, start: int):
        lo_i, hi_i = plan[d]
        lo = vals[idx[lo_i]] if lo_i >= 0 else -inf
        hi = vals[idx[hi_i]] if hi_i >= 0 else inf
        last = n - (k - d)
        if d == k - 1:
            for j in range(start, last + 1):
                v = vals[j]
                if lo < v < hi:
                    idx[d] = j
                    yield tuple(idx)
            return
        for j in range(start, last + 1):
            v = vals[j]
            if lo < v < hi:
                idx[d] = j
                yield from rec(d + 1, j + 1)

    yield from rec(0, 0)


def iter_copies(f, pi) -> Iterator[Copy]:
    """Lazily yield all copies of ``pi`` in ``f`` in lexicographic order."""
    pi = as_pattern(pi)
    for c in _iter_copies0(_values(f), pi):
        yield tuple(i + 1 for i in c)


def enumerate_copies(f, pi, limit: Optional[int] = None) -> list[Copy]:
    if limit is not None and limit < 1:
        raise ValueError("limit must be positive")
    out = []
    for c in iter_copies(f, pi):
        out.append(c)
        if limit is not None and len(out) >= limit:
            break
    return out


def find_copy(f, pi) -> Optional[Copy]:
    """Lexicographically smallest copy of ``pi`` in ``f``, or None."""
    pi = as_pattern(pi)
    vals = _values(f)
    if pi.k <= 3 and _find_small0(vals, pi) is None:
        return None
    first = next(_iter_copies0(vals, pi), None)
    return None if first is None else tuple(i + 1 for i in first)


# ---------------------------------------------------------------------------
# linear-time search for patterns of length <= 3 (any copy, not the smallest)


def _ascent(vals):
    best = 0
    for j in range(1, len(vals)):
        if vals[j] > vals[best]:
            return (best, j)
        if vals[j] < vals[best]:
            best = j
    return None


def _find_123(vals):
    n = len(vals)
    if n < 3:
        return None
    suf = [0] * n
    suf[-1] = n - 1
    for j in range(n - 2, -1, -1):
        suf[j] = j if vals[j] > vals[suf[j + 1]] else suf[j + 1]
    pre = 0
    for j in range(1, n - 1):
        v = vals[j]
        if vals[pre] < v < vals[suf[j + 1]]:
            return (pre, j, suf[j + 1])
        if v < vals[pre]:
            pre = j
    return None


def _find_132(vals):
    # scan right to left; `third` is the largest value seen so far that has a
    # strictly larger value to its left
    stack: list[int] = []
    third = None
    for i in range(len(vals) - 1, -1, -1):
        v = vals[i]
        if third is not None and v < vals[third[1]]:
            return (i, third[0], third[1])
        while stack and vals[stack[-1]] < v:
            kk = stack.pop()
            if third is None or vals[kk] > vals[third[1]]:
                third = (i, kk)
        stack.append(i)
    return None


# (reverse?, complement?) taking the pattern to a canonical one
_CANON3 = {
    (1, 2, 3): (False, False, _find_123),
    (3, 2, 1): (False, True, _find_123),
    (1, 3, 2): (False, False, _find_132),
    (2, 3, 1): (True, False, _find_132),
    (3, 1, 2): (False, True, _find_132),
    (2, 1, 3): (True, True, _find_132),
}


def _find_small0(vals: list[float], pi: Permutation):
    k = pi.k
    if len(vals) < k:
        return None
    if k == 1:
        return (0,)
    if k == 2:
        if pi.values == (1, 2):
            return _ascent(vals)
        hit = _ascent([-v for v in vals])
        return hit
    rev, comp, finder = _CANON3[pi.values]
    w = vals[::-1] if rev else vals
    if comp:
        w = [-v for v in w]
    hit = finder(w)
    if hit is None or not rev:
        return hit
    n = len(vals)
    return tuple(sorted(n - 1 - i for i in hit))


def find_any_copy(f, pi) -> Optional[Copy]:
    """Some copy of ``pi`` in ``f`` (deterministic, not necessarily the
    lexicographically smallest). Linear time for k <= 3."""
    pi = as_pattern(pi)
    vals = _values(f)
    if pi.k <= 3:
        hit = _find_small0(vals, pi)
    else:
        hit = next(_iter_copies0(vals, pi), None)
    return None if hit is None else tuple(i + 1 for i in hit)


def is_free(f, pi) -> bool:
    return find_any_copy(f, pi) is None


def max_disjoint_copies_greedy(f, pi) -> list[Copy]:
    """A maximal set of entry-disjoint copies, taking the lexicographically
    first copy among untouched entries each time."""
    pi = as_pattern(pi)
    vals = _values(f)
    alive = list(range(len(vals)))
    out = []
    while True:
        sub = [vals[i] for i in alive]
        hit = next(_iter_copies0(sub, pi), None)
        if hit is None:
            return out
        chosen = tuple(alive[i] + 1 for i in hit)
        out.append(chosen)
        drop = set(hit)
        alive = [p for j, p in enumerate(alive) if j not in drop]


def reverse_sequence(f) -> list[float]:
    return _values(f)[::-1]


def complement_sequence(f) -> list[float]:
    return [-v for v in _values(f)]
