"""Instance families: planted far instances built from a unique signed
partition, monotone controls, Template-Search instances and the pair of
(1,3,2)-testing instances obtained from them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
import math
from fractions import Fraction
from typing import Optional

import numpy as np

from permpat.partitions import SignedPartition, is_unique
from permpat.pattern import Permutation, as_pattern

PATTERN_132 = Permutation((1, 3, 2))


def _eps_count(n: int, eps: float) -> Optional[int]:
    """eps*n when it is an integer (up to float noise), else None."""
    frac = Fraction(eps).limit_denominator(10**6)
    num = frac * n
    return int(num) if num.denominator == 1 else None


@dataclass(frozen=True)
class FarInstanceSpec:
    pi: Permutation
    P: SignedPartition
    n: int
    eps: float
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "pi", as_pattern(self.pi))
        k = self.pi.k
        if self.P.pi != self.pi:
            raise ValueError("signed partition belongs to a different pattern")
        if self.n <= 0 or self.n % k:
            raise ValueError(f"n={self.n} must be a positive multiple of k={k}")
        if not 0 < self.eps <= 1 / (2 * k):
            raise ValueError(f"eps={self.eps} must lie in (0, 1/(2k)] = (0, {1 / (2 * k):.4g}]")
        copies = _eps_count(self.n, self.eps)
        if copies is None:
            raise ValueError(f"eps*n = {self.eps * self.n} is not an integer")
        if copies <= k:
            raise ValueError(f"eps*n = {copies} must exceed k={k}")

    @property
    def copies(self) -> int:
        return _eps_count(self.n, self.eps)

    @property
    def band(self) -> int:
        """Length of the interval reserved per pattern position (n/k)."""
        return self.n // self.pi.k


def snap_far_params(k: int, n: int, eps: float) -> tuple[int, float]:
    """Nearest (n', eps) with n' a multiple of k, eps*n' an integer > k.

    ``eps`` is kept; only the length moves. Raises when eps is out of range
    or no conforming length exists nearby."""
    if not 0 < eps <= 1 / (2 * k):
        raise ValueError(f"eps must lie in (0, 1/(2k)] for k={k}")
    for delta in range(0, max(n, 1000)):
        for cand in (n - delta, n + delta):
            if cand <= 0 or cand % k:
                continue
            c = _eps_count(cand, eps)
            if c is not None and c > k:
                return cand, eps
    raise ValueError(f"no conforming length near n={n} for eps={eps}")


@dataclass(frozen=True)
class FarInstance:
    spec: FarInstanceSpec
    values: np.ndarray
    offsets: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.values)

    def planted_copies(self) -> list[tuple[int, ...]]:
        """The eps*n planted copies, ordered by height band."""
        sp = self.spec
        E, m = sp.copies, sp.band
        out = []
        for band in range(E):
            pos = []
            for blk, sign, off in zip(sp.P.blocks, sp.P.signs, self.offsets):
                r = band if sign == "+" else E - 1 - band
                start = m * (blk.lo - 1) + off + r * len(blk)
                pos.extend(start + l for l in range(1, len(blk) + 1))
            out.append(tuple(pos))
        return out


def forge_far_instance(spec: FarInstanceSpec, *, check_unique: bool = True) -> FarInstance:
    """Plant eps*n disjoint copies of pi, block by block.

    Block i (positions j+1..j+len of pi) owns the interval of length
    len*n/k starting after position j*n/k. Inside it, eps*n consecutive copies
    of the block are stacked at heights r + pi/(2k), increasing for '+' and
    decreasing for '-', after a random offset. Padding is -1 before and n
    after the stack for '+', the reverse for '-'.
    """
    pi, P = spec.pi, spec.P
    k, n = pi.k, spec.n
    if check_unique and not is_unique(pi, P):
        raise ValueError(f"signed partition {P.describe()} is not unique")
    E, m = spec.copies, spec.band
    rng = np.random.default_rng(spec.seed)
    values = np.empty(n, dtype=float)
    offsets = []
    for blk, sign in zip(P.blocks, P.signs):
        size = len(blk)
        base = m * (blk.lo - 1)
        width = size * m
        # (1 - k eps) * size * m, computed exactly
        n_i = int(rng.integers(0, size * (m - E) + 1))
        offsets.append(n_i)
        ent = np.array(blk.entries(pi), dtype=float) / (2 * k)
        heights = np.arange(E, dtype=float)
        if sign == "-":
            heights = heights[::-1]
        stack = (heights[:, None] + ent[None, :]).ravel()
        before, after = (-1.0, float(n)) if sign == "+" else (float(n), -1.0)
        seg = values[base : base + width]
        seg[:n_i] = before
        seg[n_i : n_i + E * size] = stack
        seg[n_i + E * size :] = after
    return FarInstance(spec, values, tuple(offsets))


def forge_free_instance(pi, n: int, seed: int = 0) -> np.ndarray:
    """A strictly monotone sequence avoiding ``pi``: increasing unless pi is
    the identity, in which case decreasing."""
    pi = as_pattern(pi)
    if pi.k == 1:
        raise ValueError("every non-empty sequence contains a length-1 pattern")
    rng = np.random.default_rng(seed)
    steps = rng.uniform(0.5, 1.5, size=n)
    vals = np.cumsum(steps)
    if pi.values == tuple(range(1, pi.k + 1)):
        vals = -vals
    return vals


@dataclass(frozen=True)
class TemplateSearchInstance:
    """S = (-1)*delta ++ T ++ (2)*(2m - delta); solvers only see oracles."""

    T: np.ndarray
    S: np.ndarray
    delta: int = field(repr=False)

    @property
    def m(self) -> int:
        return len(self.T)

    def recover_delta(self) -> int:
        """Ground truth from full knowledge of S and T."""
        return int(np.searchsorted(self.S, self.T[0], side="left"))


def forge_template_search(m: int, seed: int = 0) -> TemplateSearchInstance:
    if m < 1:
        raise ValueError("m >= 1 required")
    rng = np.random.default_rng(seed)
    while True:
        T = np.sort(rng.random(m))
        if np.all(np.diff(T) > 0) and T[0] > 0:
            break
    delta = int(rng.integers(0, 2 * m + 1))
    S = np.concatenate([np.full(delta, -1.0), T, np.full(2 * m - delta, 2.0)])
    return TemplateSearchInstance(T, S, delta)


@dataclass(frozen=True)
class ReductionPair:
    f_yes: np.ndarray
    f_no: np.ndarray
    source: TemplateSearchInstance
    gaps: np.ndarray = field(repr=False)

    @property
    def m(self) -> int:
        return self.source.m

    def pair_position(self, l: int) -> int:
        """1-indexed position of the second (raised) prefix copy of T_l."""
        return 2 * (self.m + 1 - l)

    def template_position(self, l: int) -> int:
        """1-indexed position of T_l inside the S-part of the sequence."""
        return 2 * self.m + self.source.delta + l

    def planted_copies(self) -> list[tuple[int, int, int]]:
        """The m copies of (1,3,2) in f_no, one per template entry."""
        return [
            (self.pair_position(l) - 1, self.pair_position(l), self.template_position(l))
            for l in range(1, self.m + 1)
        ]

    def flip_pairs(self) -> list[tuple[int, int]]:
        return [(self.pair_position(l), self.template_position(l)) for l in range(1, self.m + 1)]


def template_gaps(T: np.ndarray) -> np.ndarray:
    """A quarter of the gap to the nearest neighbour (one-sided at the ends)."""
    d = np.diff(T)
    m = len(T)
    gaps = np.empty(m)
    gaps[0] = d[0]
    gaps[-1] = d[-1]
    if m > 2:
        gaps[1:-1] = np.minimum(d[:-1], d[1:])
    return gaps / 4


def forge_reduction_pair(inst: TemplateSearchInstance) -> ReductionPair:
    """Two length-5m sequences that differ in order only between the raised
    prefix copy of each T_l and the S-position of T_l.

    The prefix holds each T_l twice, as T_l - g_l then T_l + g_l, with the
    pairs laid out in decreasing order of T; the tail is S. f_no keeps S, so
    each pair plus the tail entry T_l is a (1,3,2) copy. f_yes raises every
    template entry to T_l + 2 g_l, which removes all of them.
    """
    T, S = inst.T, inst.S
    m = len(T)
    if m < 2:
        raise ValueError("m >= 2 required")
    gaps = template_gaps(T)
    if np.any(gaps <= 0):
        raise ValueError("template values must be distinct")
    prefix = np.empty(2 * m)
    order = np.arange(m)[::-1]
    prefix[0::2] = T[order] - gaps[order]
    prefix[1::2] = T[order] + gaps[order]
    tail_no = S.copy()
    tail_yes = S.copy()
    tail_yes[inst.delta : inst.delta + m] = T + 2 * gaps
    f_no = np.concatenate([prefix, tail_no])
    f_yes = np.concatenate([prefix, tail_yes])
    return ReductionPair(f_yes, f_no, inst, gaps)


@dataclass(frozen=True)
class PromiseInstance:
    """Input for the round-limited search: entries of J lie above ``alpha``
    and are increasing along J, exactly ``ell`` of them fall in (a, b), and
    every other entry is at most ``alpha``."""

    values: np.ndarray
    alpha: float
    a: float
    b: float
    J: np.ndarray
    witnesses: np.ndarray


def forge_promise_instance(n: int, gamma: float, ell: int, seed: int = 0, *,
                           decreasing: bool = False) -> PromiseInstance:
    """``decreasing=True`` reverses the order on J, which breaks the
    near-monotone promise and should surface as a violating pair."""
    size = max(ell, math.ceil(gamma * n))
    if not 1 <= ell <= size <= n:
        raise ValueError("need 1 <= ell <= gamma*n <= n")
    rng = np.random.default_rng(seed)
    J = np.sort(rng.choice(n, size=size, replace=False)) + 1
    values = rng.uniform(-1.0, 0.0, size=n)
    ranks = np.arange(1, size + 1, dtype=float)
    if decreasing:
        ranks = ranks[::-1]
    values[J - 1] = ranks
    start = int(rng.integers(0, size - ell + 1))
    a, b = start + 0.5, start + ell + 0.5
    wit = J[(values[J - 1] > a) & (values[J - 1] < b)]
    return PromiseInstance(values, 0.0, a, b, J, wit)
