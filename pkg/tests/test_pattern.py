import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from brute import brute_copies
from permpat import (
    Permutation,
    enumerate_copies,
    find_any_copy,
    find_copy,
    is_free,
    max_disjoint_copies_greedy,
    order_isomorphic,
    symmetry,
)
from permpat.pattern import as_sequence, complement_sequence, is_copy, reverse_sequence

small_seqs = st.lists(st.integers(0, 6), min_size=0, max_size=10)
perms = st.integers(1, 4).flatmap(lambda k: st.permutations(list(range(1, k + 1))))


class TestPermutation:
    def test_parse_and_str(self):
        p = Permutation.parse("1,3,2")
        assert p.values == (1, 3, 2)
        assert str(p) == "1,3,2"

    @pytest.mark.parametrize("bad", ["", "1,,2", "1,2,2", "0,1", "a,b"])
    def test_parse_rejects(self, bad):
        with pytest.raises(ValueError):
            Permutation.parse(bad)

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation((1, 3))

    def test_one_indexed_access(self):
        p = Permutation((2, 3, 1))
        assert p[1] == 2 and p[3] == 1
        assert p.position(1) == 3
        with pytest.raises(IndexError):
            p[0]

    def test_symmetries(self):
        assert symmetry((1, 3, 2), "reverse").values == (2, 3, 1)
        assert symmetry((1, 3, 2), "complement").values == (3, 1, 2)
        assert symmetry((2, 3, 1), "inverse").values == (3, 1, 2)
        with pytest.raises(ValueError):
            symmetry((1, 2), "rotate")

    def test_monotone(self):
        assert Permutation.identity(4).is_monotone()
        assert Permutation((3, 2, 1)).is_monotone()
        assert not Permutation((1, 3, 2)).is_monotone()


def test_sequence_validation():
    assert as_sequence([1, 2.5]) == (1.0, 2.5)
    for bad in (float("nan"), float("inf"), -float("inf")):
        with pytest.raises(ValueError):
            as_sequence([1.0, bad])


def test_find_copy_small_examples():
    assert find_copy([1, 3, 2], (1, 3, 2)) == (1, 2, 3)
    assert find_copy([1, 2, 3], (1, 3, 2)) is None
    assert find_copy([5, 1, 4, 2, 3], (1, 3, 2)) == (2, 3, 4)
    # ties never realize distinct ranks
    assert find_copy([1, 2, 2], (1, 3, 2)) is None


def test_enumerate_limit():
    f = [1, 3, 2, 5, 4]
    allc = enumerate_copies(f, (1, 3, 2))
    assert enumerate_copies(f, (1, 3, 2), limit=2) == allc[:2]
    with pytest.raises(ValueError):
        enumerate_copies(f, (1, 3, 2), limit=0)


@given(small_seqs, perms)
def test_copies_match_brute_force(f, pi):
    expected = brute_copies(f, pi)
    assert enumerate_copies(f, pi) == expected
    assert find_copy(f, pi) == (expected[0] if expected else None)
    hit = find_any_copy(f, pi)
    assert (hit is None) == (not expected)
    if hit is not None:
        assert is_copy(f, pi, hit)
    assert is_free(f, pi) == (not expected)


@given(small_seqs, perms)
def test_reverse_and_complement_symmetry(f, pi):
    has = find_copy(f, pi) is not None
    assert has == (find_copy(reverse_sequence(f), symmetry(pi, "reverse")) is not None)
    assert has == (find_copy(complement_sequence(f), symmetry(pi, "complement")) is not None)


@given(small_seqs, perms)
def test_greedy_packing_is_disjoint_and_maximal(f, pi):
    pack = max_disjoint_copies_greedy(f, pi)
    used = [p for c in pack for p in c]
    assert len(used) == len(set(used))
    assert all(is_copy(f, pi, c) for c in pack)
    rest = [v for i, v in enumerate(f, start=1) if i not in set(used)]
    assert is_free(rest, pi)


@given(st.lists(st.floats(-5, 5, allow_nan=False), max_size=30))
def test_21_freeness_is_monotonicity(f):
    nondecreasing = all(a <= b for a, b in zip(f, f[1:]))
    assert is_free(f, (2, 1)) == nondecreasing


def test_fast_finders_on_all_length3_patterns():
    rng = np.random.default_rng(0)
    for pi in itertools.permutations((1, 2, 3)):
        for _ in range(200):
            f = rng.integers(0, 8, size=int(rng.integers(0, 14))).tolist()
            hit = find_any_copy(f, pi)
            assert (hit is None) == (not brute_copies(f, pi))
            if hit:
                assert is_copy(f, pi, hit)


def test_order_isomorphic():
    assert order_isomorphic([10, 30, 20], [1, 3, 2])
    assert not order_isomorphic([10, 20, 30], [1, 3, 2])
    assert not order_isomorphic([1, 2], [1, 2, 3])
