"""Property testers for forbidden order patterns in real-valued sequences.

Positions in copies, oracles and transcripts are 1-indexed, matching the
usual notation f: [n] -> R.
"""

from permpat.pattern import (
    Permutation,
    as_sequence,
    enumerate_copies,
    find_any_copy,
    find_copy,
    is_free,
    iter_copies,
    max_disjoint_copies_greedy,
    order_isomorphic,
    symmetry,
)

__all__ = [
    "Permutation",
    "as_sequence",
    "enumerate_copies",
    "find_any_copy",
    "find_copy",
    "is_free",
    "iter_copies",
    "max_disjoint_copies_greedy",
    "order_isomorphic",
    "symmetry",
]

__version__ = "0.1.0"
