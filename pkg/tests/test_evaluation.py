"""Rate formulas, OMA baseline, gain errors, and Monte Carlo trials."""

import math

import numpy as np
import pytest

from mmwnoma.allocation import SystemParams, allocate_case1
from mmwnoma.arraymath import steering_vector
from mmwnoma.channels import ChannelScenario
from mmwnoma.evaluation import (
    gain_error,
    oma_sum_rate,
    rates_case1,
    rates_case2,
    run_monte_carlo,
    run_trial,
)

LOS_PAIR = tuple(
    ChannelScenario(
        kind="los",
        num_paths=4,
        num_antennas=32,
        nlos_path_power=10**-1.5,
        user_power_scale=scale,
    )
    for scale in (1.0, 0.3)
)


def random_vectors(rng, n):
    h1 = rng.normal(size=n) + 1j * rng.normal(size=n)
    h2 = rng.normal(size=n) + 1j * rng.normal(size=n)
    w = rng.normal(size=n) + 1j * rng.normal(size=n)
    w /= np.linalg.norm(w)
    return h1, h2, w


class TestRateFormulas:
    def test_silent_user2_case1(self):
        rng = np.random.default_rng(1)
        h1, h2, w = random_vectors(rng, 8)
        r1, r2 = rates_case1(h1, h2, w, 5.0, 0.0, 2.0)
        assert r2 == 0.0
        single = math.log2(1 + abs(np.vdot(h1, w)) ** 2 * 5.0 / 2.0)
        assert r1 == pytest.approx(single, rel=1e-12)

    def test_silent_user1_case2(self):
        rng = np.random.default_rng(2)
        h1, h2, w = random_vectors(rng, 8)
        r1, r2 = rates_case2(h1, h2, w, 0.0, 5.0, 2.0)
        assert r1 == 0.0
        single = math.log2(1 + abs(np.vdot(h2, w)) ** 2 * 5.0 / 2.0)
        assert r2 == pytest.approx(single, rel=1e-12)

    def test_interference_free_w_equalizes_user2(self):
        n = 8
        h1 = steering_vector(n, 0.0)
        h2 = steering_vector(n, 0.5)
        w = steering_vector(n, 2.0 / n) / math.sqrt(n)  # orthogonal to h1
        _, r2_first = rates_case1(h1, h2, w, 3.0, 4.0, 1.0)
        _, r2_second = rates_case2(h1, h2, w, 3.0, 4.0, 1.0)
        assert r2_second == pytest.approx(r2_first, rel=1e-12)

    def test_sum_rate_identity_across_orders(self):
        rng = np.random.default_rng(3)
        for _ in range(1000):
            n = int(rng.integers(2, 33))
            h1, h2, w = random_vectors(rng, n)
            p1, p2 = rng.uniform(0, 10, size=2)
            s2 = rng.uniform(0.1, 5)
            a = sum(rates_case1(h1, h2, w, p1, p2, s2))
            b = sum(rates_case2(h1, h2, w, p1, p2, s2))
            direct = math.log2(
                1
                + (abs(np.vdot(h1, w)) ** 2 * p1 + abs(np.vdot(h2, w)) ** 2 * p2) / s2
            )
            assert a == pytest.approx(direct, rel=1e-9)
            assert b == pytest.approx(direct, rel=1e-9)

    def test_ideal_gains_reproduce_allocation_rates(self):
        params = SystemParams(num_antennas=32, max_power=100.0, noise_power=1.0, r1=3.0, r2=3.0)
        alloc = allocate_case1(0.9, 0.2, params)
        # rates at the ideal operating point, from the allocation directly
        r2 = math.log2(1 + alloc.c2 * alloc.p2 / params.noise_power)
        assert r2 == pytest.approx(params.r2, rel=1e-12)
        r1 = math.log2(1 + alloc.c1 * alloc.p1 / (alloc.c2 * alloc.p2 + params.noise_power))
        assert r1 == pytest.approx(8.263415927557217, rel=1e-12)


class TestOmaBaseline:
    def test_symmetric_users_collapse(self):
        lam, n, p, s2 = 0.5, 32, 100.0, 1.0
        assert oma_sum_rate(lam, lam, n, p, s2) == pytest.approx(
            math.log2(1 + n * p * lam**2 / s2), rel=1e-12
        )

    def test_vanishing_power(self):
        assert oma_sum_rate(0.9, 0.3, 32, 0.0, 1.0) == 0.0

    def test_direct_evaluation(self):
        value = oma_sum_rate(1.0, 0.3, 32, 316.22776601683796, 1.0)
        expected = 0.5 * math.log2(1 + 16 * 2 * 316.22776601683796) + 0.5 * math.log2(
            1 + 16 * 0.09 * 2 * 316.22776601683796
        )
        assert value == pytest.approx(expected, rel=1e-12)


class TestGainError:
    def test_exact_match_is_zero(self):
        report = gain_error((21.3, 0.07), (21.3, 0.07))
        assert report.err_user1 == report.err_user2 == report.err_sum == 0.0

    def test_zero_target_counts_as_zero_error(self):
        report = gain_error((20.0, 0.003), (21.0, 0.0))
        assert report.err_user2 == 0.0
        assert report.err_user1 == pytest.approx(1.0 / 21.0)

    def test_sum_mixes_both_users(self):
        report = gain_error((18.0, 2.0), (20.0, 1.0))
        assert report.err_sum == pytest.approx(1.0 / 21.0)


class TestRunTrial:
    PARAMS = SystemParams(
        num_antennas=32,
        max_power=10**2.5,
        noise_power=1.0,
        r1=2.0,
        r2=2.0,
    )

    def test_same_seed_reproduces_everything(self):
        a = run_trial(LOS_PAIR, self.PARAMS, 1234)
        b = run_trial(LOS_PAIR, self.PARAMS, 1234)
        assert a == b

    def test_feasible_trial_report_contents(self):
        result = run_trial(LOS_PAIR, self.PARAMS, 7)
        assert result.feasible
        t = result.theoretical
        assert t.sum_rate == pytest.approx(t.r1 + t.r2, abs=1e-9)
        assert t.r2 >= self.PARAMS.r2 - 1e-6
        assert t.r1 >= self.PARAMS.r1
        # LOS effective moduli are the constant path-0 amplitudes
        assert t.oma_sum_rate == pytest.approx(
            oma_sum_rate(1.0, 0.3, 32, self.PARAMS.max_power, 1.0), rel=1e-9
        )
        assert result.practical.sum_rate == pytest.approx(t.sum_rate, rel=0.2)
        assert result.gains.err_user2 < 1e-4

    def test_infeasible_rate_is_reported_not_raised(self):
        hard = SystemParams(
            num_antennas=32, max_power=1.0, noise_power=1.0, r1=1.0, r2=12.0
        )
        result = run_trial(LOS_PAIR, hard, 3)
        assert not result.feasible
        assert result.theoretical is None
        assert "unreachable" in result.infeasible_reason


class TestMonteCarlo:
    PARAMS = TestRunTrial.PARAMS

    def test_single_trial_equals_aggregate(self):
        stats = run_monte_carlo(LOS_PAIR, self.PARAMS, 1, base_seed=55)
        trial = run_trial(LOS_PAIR, self.PARAMS, 55)
        assert stats.feasible_trials == 1
        assert stats.means["sum_theory"] == pytest.approx(trial.theoretical.sum_rate)
        assert stats.stds["sum_theory"] == 0.0

    def test_parallel_matches_serial(self):
        serial = run_monte_carlo(LOS_PAIR, self.PARAMS, 12, base_seed=9, workers=1)
        parallel = run_monte_carlo(LOS_PAIR, self.PARAMS, 12, base_seed=9, workers=3)
        assert serial == parallel

    def test_infeasible_trials_counted(self):
        hard = SystemParams(
            num_antennas=32, max_power=1.0, noise_power=1.0, r1=1.0, r2=12.0
        )
        stats = run_monte_carlo(LOS_PAIR, hard, 5, base_seed=1)
        assert stats.infeasible_trials == 5
        assert math.isnan(stats.means["sum_theory"])

    def test_rejects_zero_trials(self):
        with pytest.raises(ValueError):
            run_monte_carlo(LOS_PAIR, self.PARAMS, 0, base_seed=0)
