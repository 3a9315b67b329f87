"""Structure of a forbidden pattern: signed partitions and their blowups,
the unique signed partition number u(pi), entanglings and the entangling
number d(pi), and the adjacent-gap bound m(pi).

Blocks are 1-indexed inclusive position ranges ``Block(lo, hi)`` of pi.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from permpat.pattern import Permutation, _iter_copies0, as_pattern

UNIQUENESS_CAP = 10
ENTANGLING_CAP = 14


@dataclass(frozen=True, order=True)
class Block:
    lo: int
    hi: int

    def __post_init__(self):
        if not 1 <= self.lo <= self.hi:
            raise ValueError(f"invalid block [{self.lo}, {self.hi}]")

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def positions(self) -> range:
        return range(self.lo, self.hi + 1)

    def entries(self, pi: Permutation) -> tuple[int, ...]:
        return pi.values[self.lo - 1 : self.hi]

    def disjoint(self, other: "Block") -> bool:
        return self.hi < other.lo or other.hi < self.lo

    def __str__(self) -> str:
        return f"[{self.lo},{self.hi}]"


def _as_block(b) -> Block:
    return b if isinstance(b, Block) else Block(*b)


def partition_from_sizes(sizes: Sequence[int]) -> tuple[Block, ...]:
    blocks, lo = [], 1
    for s in sizes:
        blocks.append(Block(lo, lo + s - 1))
        lo += s
    return tuple(blocks)


def check_partition(pi: Permutation, blocks: Sequence[Block]) -> tuple[Block, ...]:
    blocks = tuple(_as_block(b) for b in blocks)
    expect = 1
    for b in blocks:
        if b.lo != expect:
            raise ValueError(f"blocks do not tile 1..{pi.k} contiguously: {blocks}")
        expect = b.hi + 1
    if expect != pi.k + 1:
        raise ValueError(f"blocks do not cover 1..{pi.k}: {blocks}")
    return blocks


def forced_sign(pi, block) -> str:
    """'-' when the block's minimum precedes its maximum, '+' otherwise."""
    pi = as_pattern(pi)
    block = _as_block(block)
    if len(block) < 2:
        raise ValueError("singleton blocks have no forced sign")
    if block.hi > pi.k:
        raise ValueError(f"block {block} exceeds pattern length {pi.k}")
    ent = block.entries(pi)
    return "-" if ent.index(min(ent)) < ent.index(max(ent)) else "+"


@dataclass(frozen=True)
class SignedPartition:
    pi: Permutation
    blocks: tuple[Block, ...]
    signs: tuple[str, ...]

    def __post_init__(self):
        pi = as_pattern(self.pi)
        object.__setattr__(self, "pi", pi)
        blocks = check_partition(pi, self.blocks)
        object.__setattr__(self, "blocks", blocks)
        signs = tuple(self.signs)
        object.__setattr__(self, "signs", signs)
        if len(signs) != len(blocks):
            raise ValueError("one sign per block required")
        for b, s in zip(blocks, signs):
            if s not in "+-" or len(s) != 1:
                raise ValueError(f"bad sign {s!r}")
            if len(b) > 1 and s != forced_sign(pi, b):
                raise ValueError(f"block {b} must carry sign {forced_sign(pi, b)}")

    @classmethod
    def from_parts(cls, pi, sizes: Sequence[int], signs) -> "SignedPartition":
        return cls(as_pattern(pi), partition_from_sizes(sizes), tuple(signs))

    def __len__(self) -> int:
        return len(self.blocks)

    def describe(self) -> str:
        parts = []
        for b in self.blocks:
            ent = b.entries(self.pi)
            parts.append(str(ent[0]) if len(ent) == 1 else "(" + ",".join(map(str, ent)) + ")")
        return "(" + ", ".join(parts) + ") S=(" + ",".join(self.signs) + ")"


def signed_partitions(pi, blocks: Sequence[Block]) -> Iterator[SignedPartition]:
    """All admissible sign vectors over a fixed partition."""
    pi = as_pattern(pi)
    blocks = check_partition(pi, blocks)
    choices = [("+", "-") if len(b) == 1 else (forced_sign(pi, b),) for b in blocks]
    for signs in itertools.product(*choices):
        yield SignedPartition(pi, blocks, signs)


def compositions(k: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Compositions of k into ``parts`` positive parts, lexicographic in cut points."""
    for cuts in itertools.combinations(range(1, k), parts - 1):
        bounds = (0,) + cuts + (k,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def all_signed_partitions(pi) -> Iterator[SignedPartition]:
    pi = as_pattern(pi)
    for parts in range(1, pi.k + 1):
        for sizes in compositions(pi.k, parts):
            yield from signed_partitions(pi, partition_from_sizes(sizes))


def blowup_sequence(pi, P: SignedPartition) -> list[float]:
    """The length-k^2 sequence f_P: k stacked copies of pi, where each block
    is repeated k times in increasing ('+') or decreasing ('-') height."""
    pi = as_pattern(pi)
    if P.pi != pi:
        raise ValueError("signed partition belongs to a different pattern")
    k = pi.k
    out = [0.0] * (k * k)
    for b, s in zip(P.blocks, P.signs):
        r, kb = b.lo - 1, len(b)
        for m in range(k):
            height = m if s == "+" else k - 1 - m
            for j in range(1, kb + 1):
                out[r * k + m * kb + j - 1] = height + pi.values[r + j - 1] / (2 * k)
    return out


def trivial_copies(pi, P: SignedPartition) -> list[tuple[int, ...]]:
    """The k copies of f_P, one per unit band (m, m+1)."""
    f = blowup_sequence(pi, P)
    bands: dict[int, list[int]] = {}
    for pos, v in enumerate(f, start=1):
        bands.setdefault(int(math.floor(v)), []).append(pos)
    return [tuple(bands[m]) for m in sorted(bands)]


def is_unique(pi, P: SignedPartition) -> bool:
    """True iff f_P has no copy of pi other than its k trivial ones."""
    pi = as_pattern(pi)
    if pi.k > UNIQUENESS_CAP:
        raise ValueError(f"uniqueness check capped at k <= {UNIQUENESS_CAP}")
    f = blowup_sequence(pi, P)
    band = [int(math.floor(v)) for v in f]
    for c in _iter_copies0(f, pi):
        b0 = band[c[0]]
        for i in c:
            if band[i] != b0:
                return False
    return True


def satisfies_necessary_conditions(pi, blocks: Sequence[Block]) -> bool:
    """Two necessary conditions for a partition to admit a unique sign
    vector: long blocks cover every value, and every long block's extremes
    are straddled by some other block unless they are 1 or k."""
    pi = as_pattern(pi)
    blocks = check_partition(pi, blocks)
    k = pi.k
    spans = [(min(b.entries(pi)), max(b.entries(pi))) for b in blocks]
    long_spans = [sp for b, sp in zip(blocks, spans) if len(b) > 1]
    for v in range(1, k + 1):
        if not any(lo <= v <= hi for lo, hi in long_spans):
            return False
    for idx, (lo, hi) in enumerate(long_spans):
        if hi < k and not any(a < hi < b for a, b in spans):
            return False
        if lo > 1 and not any(a < lo < b for a, b in spans):
            return False
    return True


@dataclass(frozen=True)
class USPNResult:
    value: int
    witness: SignedPartition
    checked: int = field(default=0, compare=False)


def uspn(pi, *, prune: bool = True) -> USPNResult:
    """Maximum size of a unique signed partition, with a witness.

    With ``prune`` the search skips partitions failing the necessary
    conditions and stops at the entangling number, whose sign-vector
    construction always yields a unique partition. ``prune=False`` checks
    every signed partition by blowup enumeration.
    """
    pi = as_pattern(pi)
    k = pi.k
    if k > UNIQUENESS_CAP:
        raise ValueError(f"uspn capped at k <= {UNIQUENESS_CAP}")
    if k == 1:
        P = SignedPartition(pi, (Block(1, 1),), ("+",))
        return USPNResult(1, P, 0)
    floor_size, floor_witness = 0, None
    if prune:
        d, E = entangling_number(pi)
        floor_witness = entangling_sign_vector(pi, E)
        floor_size = d
    checked = 0
    for parts in range(k, floor_size, -1):
        for sizes in compositions(k, parts):
            blocks = partition_from_sizes(sizes)
            if prune and not satisfies_necessary_conditions(pi, blocks):
                continue
            for P in signed_partitions(pi, blocks):
                checked += 1
                if is_unique(pi, P):
                    return USPNResult(parts, P, checked)
    if floor_witness is None:
        raise AssertionError("no unique signed partition found")
    return USPNResult(floor_size, floor_witness, checked)


# ---------------------------------------------------------------------------
# shadowing and entanglings


def is_shadowed(pi, sigma, sigma_prime) -> bool:
    """Whether ``sigma_prime`` is shadowed with respect to ``sigma``."""
    pi = as_pattern(pi)
    s, t = _as_block(sigma), _as_block(sigma_prime)
    if len(s) < 2 or len(t) < 2:
        raise ValueError("shadowing is defined for blocks of length >= 2")
    if not s.disjoint(t):
        raise ValueError(f"blocks {s} and {t} overlap")
    if max(s.hi, t.hi) > pi.k:
        raise ValueError("block exceeds pattern length")
    ent = t.entries(pi)
    m = t.lo + ent.index(min(ent))
    M = t.lo + ent.index(max(ent))
    p = lambda i: pi.values[i - 1]  # noqa: E731
    if t.lo > s.hi:
        nb = p(t.lo - 1)
        return (m < M and nb > p(M)) or (m > M and nb < p(m))
    nb = p(t.hi + 1)
    return (m < M and nb < p(m)) or (m > M and nb > p(M))


def is_entangling(pi, E: Sequence[Block]) -> bool:
    pi = as_pattern(pi)
    E = [_as_block(b) for b in E]
    k = pi.k
    if not E or any(len(b) < 2 or b.hi > k for b in E):
        return False
    for a, b in itertools.combinations(E, 2):
        if not a.disjoint(b):
            return False
    first = E[0]
    lo, hi = min(first.entries(pi)), max(first.entries(pi))
    for blk in E[1:]:
        if blk.lo > first.hi:
            inner = pi.values[blk.lo - 1]
        else:
            inner = pi.values[blk.hi - 1]
        if not lo < inner < hi:
            return False
        if is_shadowed(pi, first, blk):
            return False
        lo = min(lo, min(blk.entries(pi)))
        hi = max(hi, max(blk.entries(pi)))
    # each new block's span meets the running span, so the union is [lo, hi]
    return lo == 1 and hi == k


def entangling_number(pi, *, cap: int = ENTANGLING_CAP) -> tuple[int, Optional[tuple[Block, ...]]]:
    """d(pi) and a witnessing entangling (ordered, first block distinguished).

    Shortest-path search over (span, used positions) states where the cost is
    the number of positions absorbed into long blocks. Only blocks that widen
    the span are added; dropping a block that does not widen it keeps an
    entangling valid and lowers the cost.
    """
    pi = as_pattern(pi)
    k = pi.k
    if k > cap:
        raise ValueError(f"entangling search capped at k <= {cap}")
    if k < 2:
        return 0, None
    vals = pi.values
    blocks = [Block(a, b) for a in range(1, k + 1) for b in range(a + 1, k + 1)]
    info = {}
    for blk in blocks:
        ent = blk.entries(pi)
        mask = ((1 << len(blk)) - 1) << (blk.lo - 1)
        info[blk] = (min(ent), max(ent), mask)

    heap = []
    for blk in blocks:
        lo, hi, mask = info[blk]
        heapq.heappush(heap, (len(blk) - 1, (blk,), lo, hi, mask))

    candidates: dict[Block, list] = {}
    best: dict[tuple, int] = {}
    while heap:
        cost, chosen, lo, hi, mask = heapq.heappop(heap)
        if lo == 1 and hi == k:
            return k - cost, chosen
        key = (chosen[0], lo, hi, mask)
        if best.get(key, math.inf) <= cost:
            continue
        best[key] = cost
        first = chosen[0]
        if first not in candidates:
            cl = []
            for blk in blocks:
                if not blk.disjoint(first) or is_shadowed(pi, first, blk):
                    continue
                inner = vals[blk.lo - 1] if blk.lo > first.hi else vals[blk.hi - 1]
                cl.append((blk, inner))
            candidates[first] = cl
        for blk, inner in candidates[first]:
            blo, bhi, bmask = info[blk]
            if bmask & mask or not lo < inner < hi:
                continue
            if blo >= lo and bhi <= hi:
                continue
            heapq.heappush(
                heap,
                (cost + len(blk) - 1, chosen + (blk,), min(lo, blo), max(hi, bhi), mask | bmask),
            )
    raise AssertionError("the whole permutation is always an entangling")


def entangling_partition(pi, E: Sequence[Block]) -> tuple[Block, ...]:
    """Lambda(E): the blocks of E as parts, every other entry a singleton."""
    pi = as_pattern(pi)
    E = sorted(_as_block(b) for b in E)
    out, pos = [], 1
    for blk in E:
        while pos < blk.lo:
            out.append(Block(pos, pos))
            pos += 1
        out.append(blk)
        pos = blk.hi + 1
    while pos <= pi.k:
        out.append(Block(pos, pos))
        pos += 1
    return tuple(out)


def entangling_sign_vector(pi, E: Sequence[Block]) -> SignedPartition:
    """Signs on Lambda(E) that make the signed partition unique: forced signs
    on long blocks; singletons left of the first block compare with their
    right neighbour, singletons right of it with their left neighbour."""
    pi = as_pattern(pi)
    E = [_as_block(b) for b in E]
    if not is_entangling(pi, E):
        raise ValueError(f"not an entangling of {pi}: {E}")
    blocks = entangling_partition(pi, E)
    anchor = E[0]
    v = lambda i: pi.values[i - 1]  # noqa: E731
    signs = []
    for b in blocks:
        if len(b) > 1:
            signs.append(forced_sign(pi, b))
        elif b.hi < anchor.lo:
            signs.append("+" if v(b.lo) > v(b.lo + 1) else "-")
        else:
            signs.append("+" if v(b.lo) < v(b.lo - 1) else "-")
    return SignedPartition(pi, blocks, tuple(signs))


def max_adjacent_gap(pi) -> int:
    pi = as_pattern(pi)
    if pi.k < 2:
        raise ValueError("m(pi) needs k >= 2")
    return max(abs(a - b) for a, b in zip(pi.values, pi.values[1:]))


def adjacent_extremes(pi) -> bool:
    """Whether 1 and k sit in adjacent positions."""
    pi = as_pattern(pi)
    return abs(pi.position(1) - pi.position(pi.k)) == 1


def hierarchy_permutation(k: int, l: int) -> Permutation:
    """Canonical permutation with 1 at position l, 2..l before it and l+i at
    position l+i; its largest adjacent gap is l."""
    if not 2 <= l <= k - 1:
        raise ValueError(f"need 2 <= l <= k-1, got k={k}, l={l}")
    return Permutation(tuple(range(2, l + 1)) + (1,) + tuple(range(l + 1, k + 1)))


# ---------------------------------------------------------------------------
# random permutations


@dataclass(frozen=True)
class RandomPermutationStats:
    k: int
    seed: int
    permutations: tuple[Permutation, ...]
    d_values: tuple[int, ...]

    @property
    def samples(self) -> int:
        return len(self.d_values)

    @property
    def frac_d_ge_k_minus_3(self) -> float:
        return sum(d >= self.k - 3 for d in self.d_values) / self.samples

    @property
    def frac_d_ge_k_minus_2(self) -> float:
        return sum(d >= self.k - 2 for d in self.d_values) / self.samples


def fisher_yates(k: int, rng: np.random.Generator) -> Permutation:
    vals = list(range(1, k + 1))
    for i in range(k - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        vals[i], vals[j] = vals[j], vals[i]
    return Permutation(tuple(vals))


def random_permutation_stats(k: int, samples: int, seed: int, *, cap: int = ENTANGLING_CAP) -> RandomPermutationStats:
    if k < 4:
        raise ValueError("k >= 4 required")
    if samples < 1:
        raise ValueError("samples >= 1 required")
    if k > cap:
        raise ValueError(f"entangling search capped at k <= {cap}")
    rng = np.random.default_rng(seed)
    perms, ds = [], []
    for _ in range(samples):
        pi = fisher_yates(k, rng)
        perms.append(pi)
        ds.append(entangling_number(pi, cap=cap)[0])
    return RandomPermutationStats(k, seed, tuple(perms), tuple(ds))
