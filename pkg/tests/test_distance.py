import pytest
from hypothesis import given
from hypothesis import strategies as st

from brute import brute_distance
from permpat import is_free
from permpat.distance import (
    DistanceReport,
    SearchBudgetExceeded,
    deletion_distance_exact,
    deletion_set_to_modifications,
    distance_bounds,
    is_far,
    minimum_deletion_set,
)

seqs = st.lists(st.integers(0, 8), max_size=9)
pat3 = st.permutations([1, 2, 3])


def test_report_examples():
    assert distance_bounds([1, 2, 3, 4], (1, 3, 2)) == DistanceReport(0, 0, 0)
    rep = distance_bounds([1, 3, 2], (1, 3, 2), exact=True)
    assert (rep.lower, rep.upper, rep.exact) == (1, 3, 1)
    assert distance_bounds([1, 3, 2], (1, 3, 2)).exact is None


def test_report_consistency_check():
    with pytest.raises(ValueError):
        DistanceReport(2, 3, 5)


def test_exact_examples():
    assert deletion_distance_exact([1, 3, 2], (1, 3, 2)) == 1
    f = [2, 4, 1, 5, 3]
    assert deletion_distance_exact(f, (1, 3, 2)) == brute_distance(f, (1, 3, 2))


def test_budget_is_reported_not_guessed():
    f = [1, 3, 2, 4, 6, 5, 7, 9, 8, 10, 12, 11] * 2
    with pytest.raises(SearchBudgetExceeded):
        deletion_distance_exact(f, (1, 3, 2), budget=1)


@given(seqs, pat3)
def test_exact_matches_brute_force(f, pi):
    d = deletion_distance_exact(f, pi)
    assert d == brute_distance(f, pi)
    S = minimum_deletion_set(f, pi)
    assert len(S) == d
    rest = [v for i, v in enumerate(f, start=1) if i not in S]
    assert is_free(rest, pi)
    rep = distance_bounds(f, pi, exact=True)
    assert rep.lower <= d <= rep.upper


@given(seqs, pat3)
def test_deletions_become_modifications(f, pi):
    if len(f) < 2:
        return
    S = minimum_deletion_set(f, pi)
    if len(S) == len(f):
        return
    g = deletion_set_to_modifications(f, S)
    assert sum(a != b for a, b in zip(f, g)) <= len(S)
    assert is_free(g, pi)


def test_modification_examples():
    assert deletion_set_to_modifications([1, 3, 2], set()) == [1, 3, 2]
    assert deletion_set_to_modifications([1, 3, 2], {2}) == [1, 1, 2]
    assert deletion_set_to_modifications([1, 3, 2, 4], {2, 3}) == [1, 1, 1, 4]
    with pytest.raises(ValueError):
        deletion_set_to_modifications([1, 2], {1, 2})
    with pytest.raises(ValueError):
        deletion_set_to_modifications([1, 2], {3})


def test_is_far():
    assert is_far([1, 3, 2], (1, 3, 2), 1 / 3)
    assert not is_far([1, 3, 2], (1, 3, 2), 0.5)
