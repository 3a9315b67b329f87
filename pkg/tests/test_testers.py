import math
import warnings

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from permpat.forge import (
    PATTERN_132,
    FarInstanceSpec,
    forge_far_instance,
    forge_free_instance,
    forge_promise_instance,
    forge_template_search,
)
from permpat.oracle import (
    AccessError,
    QueryBudgetExceeded,
    QueryOracle,
    RoundClock,
    RoundLimitExceeded,
    batch,
    paired_oracles,
)
from permpat.partitions import uspn
from permpat.testers import (
    ValidityWarning,
    Verdict,
    check_search_outcome,
    interval_test,
    plan_interval_queries,
    round_limited_search,
    sampler_budget,
    sampler_test,
    template_binary_search,
    template_r_round_solver,
    witness_from_transcript,
)

pytestmark = pytest.mark.filterwarnings("ignore::permpat.testers.ValidityWarning")


class TestOracle:
    def test_non_adaptive_single_batch(self):
        o = QueryOracle([5, 6, 7], mode="non-adaptive")
        assert o.query([3, 1]) == [7.0, 5.0]
        assert o.transcript == [(1, 3, 7.0), (1, 1, 5.0)]
        with pytest.raises(RoundLimitExceeded):
            o.query([2])
        assert o.queries_used == 2 and o.rounds_used == 1

    def test_round_limit_and_budget(self):
        o = QueryOracle(range(10), mode="rounds", rounds=2, budget=3)
        o.query([1, 2])
        with pytest.raises(QueryBudgetExceeded):
            o.query([3, 4])
        assert o.queries_used == 2 and o.rounds_used == 1  # refused batch costs nothing
        o.query([3])
        with pytest.raises(AccessError):
            o.query([])

    def test_positions_validated(self):
        o = QueryOracle([1, 2])
        for bad in ([0], [3]):
            with pytest.raises(IndexError):
                o.query(bad)

    def test_bad_modes(self):
        with pytest.raises(ValueError):
            QueryOracle([1], mode="sometimes")
        with pytest.raises(ValueError):
            QueryOracle([1], mode="rounds")
        with pytest.raises(ValueError):
            QueryOracle([1], mode="rounds", rounds=2, clock=RoundClock(3))

    def test_shared_clock_batch(self):
        S, T = paired_oracles([1, 2, 3], [9, 8], mode="rounds", rounds=1)
        vs, vt = batch([(S, [1]), (T, [2])])
        assert vs == [1.0] and vt == [8.0]
        assert S.rounds_used == T.rounds_used == 1
        with pytest.raises(RoundLimitExceeded):
            S.query([2])
        with pytest.raises(AccessError):
            batch([(S, [1]), (QueryOracle([1]), [1])])


class TestSampler:
    def test_queries_everything_when_small(self):
        o = QueryOracle([1, 3, 2], mode="non-adaptive", budget=3)
        v = sampler_test(o, PATTERN_132, 0.1, seed=0)
        assert v.decision == "reject" and v.witness == (1, 2, 3)
        assert v.queries_used == 3 and v.rounds_used == 1

    def test_budget_exhaustion_accepts_with_flag(self):
        o = QueryOracle(np.arange(1000.0), mode="non-adaptive", budget=5)
        v = sampler_test(o, PATTERN_132, 0.1, seed=0)
        assert v.decision == "accept" and "budget-exceeded" in v.flags
        assert v.queries_used == 0

    def test_budget_formula(self):
        n = 2 ** 21
        assert sampler_budget(n, 3, 0.1) == math.ceil(12 * 0.1 ** (-1 / 3) * n ** (2 / 3))
        assert sampler_budget(4096, 3, 0.1) == 4096
        assert sampler_budget(10, 3, 0.1) == 10

    def test_nested_samples(self):
        f = np.random.default_rng(1).random(500)
        a = QueryOracle(f, mode="non-adaptive")
        b = QueryOracle(f, mode="non-adaptive")
        sampler_test(a, PATTERN_132, 0.1, seed=4, q=40)
        sampler_test(b, PATTERN_132, 0.1, seed=4, q=80)
        assert {p for _, p, _ in a.transcript} <= {p for _, p, _ in b.transcript}

    def test_verdict_requires_witness(self):
        with pytest.raises(ValueError):
            Verdict("reject", None, 0, 0)


class TestIntervalTester:
    def test_plan_is_monotone_in_rate(self):
        lo = plan_interval_queries(3000, 3, 0.1, seed=9, p=0.01)
        hi = plan_interval_queries(3000, 3, 0.1, seed=9, p=0.03)
        assert set(lo.positions) <= set(hi.positions)

    def test_query_cap(self):
        n, eps, k = 2 ** 14, 0.05, 3
        for seed in range(20):
            plan = plan_interval_queries(n, k, eps, seed, c=1.0)
            assert len(plan.positions) <= 2 * 200 * plan.c * plan.m / eps + 2

    def test_abort_rule(self):
        # a huge rate with a tiny constant trips both caps
        plan = plan_interval_queries(4000, 3, 0.1, seed=0, c=0.001, p=1.0)
        assert plan.aborted == ("case1-aborted", "case2-aborted")
        assert plan.positions == ()

    def test_default_rate_saturates_at_desk_scale(self):
        o = QueryOracle(np.arange(600.0), mode="non-adaptive")
        v = interval_test(o, PATTERN_132, 0.1, seed=0)
        assert v.constants["p"] == 1.0 and v.constants["c"] == 900
        assert v.decision == "accept"

    def test_rejects_short_patterns(self):
        with pytest.raises(ValueError):
            interval_test(QueryOracle([1, 2]), (2, 1), 0.1, 0)

    def test_validity_warning(self):
        with warnings.catch_warnings(record=True) as rec:
            warnings.simplefilter("always")
            interval_test(QueryOracle(np.arange(100.0), mode="non-adaptive"), PATTERN_132, 0.1, 0)
        assert any(issubclass(w.category, ValidityWarning) for w in rec)

    def test_rejects_far_instance(self):
        P = uspn(PATTERN_132).witness
        inst = forge_far_instance(FarInstanceSpec(PATTERN_132, P, 3000, 0.1, seed=2))
        o = QueryOracle(inst.values, mode="non-adaptive")
        v = interval_test(o, PATTERN_132, 0.1, seed=2, p=0.1)
        assert v.rejected and witness_from_transcript(o, PATTERN_132, v.witness)


@given(st.sampled_from([(1, 3, 2), (2, 3, 1), (3, 1, 2), (2, 1, 3), (1, 2, 3), (2, 1, 4, 3), (3, 1, 4, 2)]),
       st.integers(20, 400), st.integers(0, 2 ** 32), st.sampled_from(["sampler", "interval"]))
def test_one_sided_on_free_inputs(pi, n, seed, tester):
    f = forge_free_instance(pi, n, seed)
    o = QueryOracle(f, mode="non-adaptive")
    run = sampler_test if tester == "sampler" else interval_test
    v = run(o, pi, 0.1, seed, **({} if tester == "sampler" else {"p": 0.2}))
    assert v.decision == "accept"
    assert v.queries_used == len(o.transcript)


@given(st.integers(0, 2 ** 32), st.sampled_from(["sampler", "interval"]))
def test_replay_agreeing_sequence_gives_same_transcript(seed, tester):
    rng = np.random.default_rng(seed)
    f = rng.random(300)
    o1 = QueryOracle(f, mode="non-adaptive")
    run = sampler_test if tester == "sampler" else interval_test
    kw = {"q": 40} if tester == "sampler" else {"p": 0.05}
    run(o1, PATTERN_132, 0.1, seed, **kw)
    g = rng.random(300)
    for _, p, v in o1.transcript:
        g[p - 1] = v
    o2 = QueryOracle(g, mode="non-adaptive")
    v2 = run(o2, PATTERN_132, 0.1, seed, **kw)
    assert o2.transcript == o1.transcript
    v1 = run(QueryOracle(f, mode="non-adaptive"), PATTERN_132, 0.1, seed, **kw)
    assert (v1.decision, v1.witness) == (v2.decision, v2.witness)


class TestRoundLimitedSearch:
    @pytest.mark.parametrize("r", [1, 2, 3])
    def test_success_on_promise_inputs(self, r):
        n = 2 ** 16
        ell = math.ceil(n ** (1 / (r + 1)))
        wins = 0
        for seed in range(40):
            pr = forge_promise_instance(n, 0.5, ell, seed)
            o = QueryOracle(pr.values, mode="rounds", rounds=r)
            out = round_limited_search(o, (1, n), pr.alpha, pr.a, pr.b, r, 0.5, ell, seed)
            assert o.rounds_used <= r
            assert check_search_outcome(o, out, pr.alpha, pr.a, pr.b)
            assert out.kind in ("witness", "not-found")
            wins += out.kind == "witness"
        assert wins >= 2 / 3 * 40

    def test_violating_pair(self):
        pr = forge_promise_instance(4096, 0.5, 20, seed=1, decreasing=True)
        o = QueryOracle(pr.values, mode="rounds", rounds=2)
        out = round_limited_search(o, (1, 4096), pr.alpha, -1e9, -1e9 + 1, 2, 0.5, 20, 1)
        assert out.kind == "pair"
        assert check_search_outcome(o, out, pr.alpha, -1e9, -1e9 + 1)

    def test_empty_filter_is_not_found(self):
        o = QueryOracle(-np.ones(500), mode="rounds", rounds=2)
        out = round_limited_search(o, (1, 500), 0.0, 1.0, 2.0, 2, 0.5, 5, 0)
        assert out.kind == "not-found" and out.rounds_used == 1

    def test_budget_exhaustion_is_not_found(self):
        o = QueryOracle(np.arange(500.0), mode="rounds", rounds=1, budget=2)
        out = round_limited_search(o, (1, 500), -1.0, 100.0, 102.0, 1, 1.0, 1, 0)
        assert out.kind == "not-found"

    def test_single_round_is_pure_sampling(self):
        o = QueryOracle(np.arange(1.0, 101.0), mode="rounds", rounds=1)
        out = round_limited_search(o, (1, 100), 0.0, 0.5, 100.5, 1, 1.0, 100, 0)
        assert out.kind == "witness" and o.rounds_used == 1


class TestTemplateSolvers:
    def test_binary_exact_small(self):
        for m in (1, 2, 5):
            for seed in range(15):
                inst = forge_template_search(m, seed)
                S, T = paired_oracles(inst.S, inst.T)
                assert template_binary_search(S, T) == inst.delta

    def test_binary_zero_offset(self):
        seed = next(s for s in range(500) if forge_template_search(20, s).delta == 0)
        inst = forge_template_search(20, seed)
        S, T = paired_oracles(inst.S, inst.T)
        assert template_binary_search(S, T) == 0

    def test_binary_query_bound(self):
        m = 10 ** 4
        for seed in range(10):
            inst = forge_template_search(m, seed)
            S, T = paired_oracles(inst.S, inst.T)
            assert template_binary_search(S, T) == inst.delta
            assert S.queries_used + T.queries_used <= 2 + 2 * math.ceil(math.log2(3 * m))

    def test_grid_exact_regimes(self):
        m = 37
        r_full = math.ceil(math.log2(2 * m + 1))
        for seed in range(30):
            inst = forge_template_search(m, seed)
            S, T = paired_oracles(inst.S, inst.T, mode="rounds", rounds=r_full)
            assert template_r_round_solver(S, T, r_full, 4 * r_full) == inst.delta
            S, T = paired_oracles(inst.S, inst.T, mode="rounds", rounds=1)
            assert template_r_round_solver(S, T, 1, 3 * m) == inst.delta
            assert S.queries_used + T.queries_used <= 3 * m

    def test_grid_respects_rounds_and_budget(self):
        inst = forge_template_search(1000, 3)
        S, T = paired_oracles(inst.S, inst.T, mode="rounds", rounds=3)
        template_r_round_solver(S, T, 3, 20)
        assert S.rounds_used <= 3 and S.queries_used + T.queries_used <= 20
