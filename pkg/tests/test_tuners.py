"""Tests for the tuner implementations."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cotune.landscape import synth
from cotune.requirement import Fragment, Proposition
from cotune.tuners import (
    TunerParams,
    compute_theta,
    cotune_run,
    ga_run,
    random_run,
)


def small_landscape():
    return synth(seed=1, n_options=6, domain_sizes=2, shape="additive")


def strict_proposition(land, quantile=0.1):
    """Score 1 below the given quantile of performance, tapering to 0."""
    values = sorted(land.measurements.values())
    cut = values[int(quantile * len(values))]
    mid = 0.5 * (cut + land.v_max)
    return Proposition((
        Fragment("E", land.v_min, cut, 1.0, 1.0),
        Fragment("S", cut, mid, 1.0, 0.0),
        Fragment("E", mid, land.v_max, 0.0, 0.0),
    ))


def everything_satisfies(land):
    return Proposition((Fragment("E", land.v_min, land.v_max, 1.0, 1.0),))


def nothing_satisfies(land):
    return Proposition((Fragment("E", land.v_min, land.v_max, 0.0, 0.0),))


class TestTheta:
    def test_zero_weights_give_one(self):
        assert compute_theta(0.0, 0.0, 0.0, 0.0) == 1.0

    def test_symmetric_weights_give_half(self):
        assert compute_theta(0.4, 0.4, 0.1, 0.1) == pytest.approx(0.5)

    def test_arithmetic_case(self):
        assert compute_theta(0.6, 0.2, 0.1, 0.1) == pytest.approx(0.7)

    def test_negative_improvement_floored(self):
        assert compute_theta(0.5, 0.5, -0.3, 0.0) == pytest.approx(0.5)

    @settings(max_examples=300, deadline=None)
    @given(st.floats(0, 1), st.floats(0, 1),
           st.floats(-1, 1), st.floats(-1, 1))
    def test_theta_in_unit_interval(self, ma, mt, ia, it):
        assert 0.0 <= compute_theta(ma, mt, ia, it) <= 1.0


class TestCotuneRun:
    def test_deterministic(self):
        land = small_landscape()
        p_t = strict_proposition(land)
        params = TunerParams(budget=100, early_stop=False)
        a = cotune_run(land, p_t, params, seed=5)
        b = cotune_run(land, p_t, params, seed=5)
        assert a.trajectory == b.trajectory
        assert a.best_config == b.best_config

    def test_budget_respected(self):
        land = small_landscape()
        p_t = strict_proposition(land)
        for seed in range(5):
            r = cotune_run(land, p_t, TunerParams(early_stop=False), seed=seed)
            assert r.budget_consumed <= 300

    def test_trajectory_best_non_decreasing(self):
        land = small_landscape()
        p_t = strict_proposition(land)
        r = cotune_run(land, p_t, TunerParams(early_stop=False), seed=2)
        bests = [row.best_pt_score for row in r.trajectory]
        assert bests == sorted(bests)

    def test_early_stop_at_initialization(self):
        land = small_landscape()
        r = cotune_run(land, everything_satisfies(land),
                       TunerParams(early_stop=True), seed=0)
        assert r.best_score == 1.0
        assert r.budget_consumed == 10

    def test_degenerate_target_completes_with_zero(self):
        land = small_landscape()
        r = cotune_run(land, nothing_satisfies(land),
                       TunerParams(budget=60, early_stop=False), seed=1)
        assert r.best_score == 0.0
        # Case 0 fires immediately but nothing is distinguishable to relax
        assert any(e.get("case") == "case0" for e in r.events)

    def test_budget_too_small(self):
        land = small_landscape()
        with pytest.raises(ValueError):
            cotune_run(land, strict_proposition(land),
                       TunerParams(budget=15), seed=0)

    def test_populations_best_flag(self):
        land = small_landscape()
        p_t = strict_proposition(land)
        r = cotune_run(land, p_t,
                       TunerParams(early_stop=False, best_from="populations"),
                       seed=3)
        assert 0.0 <= r.best_score <= 1.0

    def test_forced_guidance_after_change(self):
        land = synth(seed=8, n_options=10, domain_sizes=2, shape="rugged")
        p_t = strict_proposition(land, quantile=0.01)
        r = cotune_run(land, p_t, TunerParams(early_stop=False), seed=4)
        changes = {e["iteration"] for e in r.events
                   if "new_encoding" in e
                   and e["new_encoding"] != e["old_encoding"]}
        for row in r.trajectory:
            if row.iteration - 1 in changes and row.iteration >= 2:
                assert row.guiding_proposition == "p_a"


class TestAblationIdentity:
    def test_all_cases_disabled_equals_ga_p(self):
        land = synth(seed=8, n_options=10, domain_sizes=2, shape="rugged")
        p_t = strict_proposition(land, quantile=0.05)
        for seed in (0, 1, 2):
            params = TunerParams(early_stop=False, enable_case0=False,
                                 enable_case1=False, enable_case2=False)
            a = cotune_run(land, p_t, params, seed=seed)
            b = ga_run(land, p_t, TunerParams(early_stop=False), seed=seed)
            assert a.trajectory == b.trajectory
            assert a.best_config == b.best_config


class TestGaRun:
    def test_raw_finds_optimum_with_generous_budget(self):
        land = synth(seed=2, n_options=6, domain_sizes=2, shape="additive")
        p_t = strict_proposition(land, quantile=0.02)
        best_config = min(land.measurements, key=land.measurements.get)
        r = ga_run(land, p_t, TunerParams(budget=64, generations=100,
                                          early_stop=False),
                   seed=0, objective="raw")
        assert land.measurements[r.best_config] <= sorted(
            land.measurements.values())[3]
        assert r.best_score == p_t.evaluate(land.measurements[r.best_config])

    def test_raw_trajectory_non_decreasing(self):
        land = small_landscape()
        p_t = strict_proposition(land)
        r = ga_run(land, p_t, TunerParams(early_stop=False), seed=7,
                   objective="raw")
        bests = [row.best_pt_score for row in r.trajectory]
        assert bests == sorted(bests)

    def test_everything_satisfies_immediately(self):
        land = small_landscape()
        r = ga_run(land, everything_satisfies(land),
                   TunerParams(early_stop=True), seed=0)
        assert r.best_score == 1.0

    def test_unknown_objective(self):
        land = small_landscape()
        with pytest.raises(ValueError):
            ga_run(land, strict_proposition(land), TunerParams(), seed=0,
                   objective="speed")


class TestRandomRun:
    def test_exhaustive_budget_finds_global_best(self):
        land = small_landscape()
        p_t = strict_proposition(land)
        r = random_run(land, p_t, budget=64, seed=0, early_stop=False)
        best = max(p_t.evaluate(v) for v in land.measurements.values())
        assert r.best_score == pytest.approx(best)

    def test_single_measurement(self):
        land = small_landscape()
        r = random_run(land, strict_proposition(land), budget=1, seed=3)
        assert r.budget_consumed == 1

    def test_mean_best_matches_order_statistics(self):
        # drawing B distinct configurations uniformly: the expected best
        # score follows the exact order statistics of the score multiset
        land = small_landscape()
        p_t = strict_proposition(land, quantile=0.3)
        B = 8
        scores = sorted(p_t.evaluate(v) for v in land.measurements.values())
        n = len(scores)
        expected = 0.0
        prev = 0.0
        for k in range(B, n + 1):
            # P(best among B draws is at most the k-th smallest score)
            p_le = math.comb(k, B) / math.comb(n, B)
            expected += scores[k - 1] * (p_le - prev)
            prev = p_le
        observed = sum(
            random_run(land, p_t, budget=B, seed=s, early_stop=False).best_score
            for s in range(1000)) / 1000
        assert observed == pytest.approx(expected, abs=0.02)
