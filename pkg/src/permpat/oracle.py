"""Query access with an enforced batch (round) discipline.

Every call to :meth:`QueryOracle.query` is one batch: positions go in, and
values come out only after the whole batch is fixed. A non-adaptive oracle
allows one batch, an r-round oracle r batches, an adaptive one any number.
Oracles that share a :class:`RoundClock` share the round count, and
:func:`batch` queries several of them in a single round.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

MODES = ("non-adaptive", "rounds", "adaptive")


class AccessError(RuntimeError):
    pass


class RoundLimitExceeded(AccessError):
    pass


class QueryBudgetExceeded(AccessError):
    pass


class RoundClock:
    def __init__(self, max_rounds: Optional[int] = None):
        if max_rounds is not None and max_rounds < 1:
            raise ValueError("max_rounds must be positive")
        self.max_rounds = max_rounds
        self.used = 0

    def tick(self) -> int:
        if self.max_rounds is not None and self.used >= self.max_rounds:
            raise RoundLimitExceeded(f"all {self.max_rounds} rounds used")
        self.used += 1
        return self.used


class QueryOracle:
    """Hidden sequence behind 1-indexed query access.

    ``transcript`` holds (round, position, value) triples in query order.
    """

    def __init__(
        self,
        target,
        mode: str = "adaptive",
        rounds: Optional[int] = None,
        budget: Optional[int] = None,
        clock: Optional[RoundClock] = None,
    ):
        if mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if mode == "non-adaptive":
            rounds = 1
        elif mode == "rounds":
            if rounds is None or rounds < 1:
                raise ValueError("r-round mode needs rounds >= 1")
        else:
            rounds = None
        if clock is None:
            clock = RoundClock(rounds)
        elif clock.max_rounds != rounds:
            raise ValueError("shared clock disagrees with the oracle's round limit")
        self._target = np.asarray(target, dtype=float)
        self.mode = mode
        self.rounds = rounds
        self.budget = budget
        self.clock = clock
        self.transcript: list[tuple[int, int, float]] = []

    @property
    def n(self) -> int:
        return len(self._target)

    @property
    def queries_used(self) -> int:
        return len(self.transcript)

    @property
    def rounds_used(self) -> int:
        return self.clock.used

    @property
    def remaining(self) -> Optional[int]:
        return None if self.budget is None else self.budget - len(self.transcript)

    def _check(self, positions: Sequence[int]) -> list[int]:
        pos = [int(p) for p in positions]
        for p in pos:
            if not 1 <= p <= self.n:
                raise IndexError(f"position {p} outside 1..{self.n}")
        if self.budget is not None and len(self.transcript) + len(pos) > self.budget:
            raise QueryBudgetExceeded(
                f"{len(pos)} more queries would exceed the budget of {self.budget}"
            )
        return pos

    def _answer(self, rnd: int, pos: list[int]) -> list[float]:
        vals = self._target[np.asarray(pos, dtype=np.int64) - 1].tolist() if pos else []
        self.transcript.extend(zip([rnd] * len(pos), pos, vals))
        return vals

    def query(self, positions: Sequence[int]) -> list[float]:
        """Submit one batch and return its values in the same order."""
        pos = self._check(positions)
        rnd = self.clock.tick()
        return self._answer(rnd, pos)

    def known_values(self) -> dict[int, float]:
        return {p: v for _, p, v in self.transcript}


def batch(requests: Sequence[tuple[QueryOracle, Sequence[int]]]) -> list[list[float]]:
    """Query several oracles on one shared clock as a single round."""
    if not requests:
        return []
    clock = requests[0][0].clock
    if any(o.clock is not clock for o, _ in requests):
        raise AccessError("batched oracles must share one clock")
    checked = [(o, o._check(p)) for o, p in requests]
    rnd = clock.tick()
    return [o._answer(rnd, p) for o, p in checked]


def paired_oracles(S, T, mode: str = "adaptive", rounds: Optional[int] = None, budget: Optional[int] = None):
    """Two oracles on one clock. ``budget`` caps each oracle separately."""
    limit = 1 if mode == "non-adaptive" else (rounds if mode == "rounds" else None)
    clock = RoundClock(limit)
    return (
        QueryOracle(S, mode, rounds, budget, clock),
        QueryOracle(T, mode, rounds, budget, clock),
    )
