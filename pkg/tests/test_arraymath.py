"""Array-response math: steering vectors, beam gains, patterns."""

import cmath
import math

import numpy as np
import pytest

from mmwnoma.arraymath import (
    EffectiveChannel,
    MultipathChannel,
    beam_gain,
    beam_pattern,
    effective_channel,
    pattern_grid,
    steering_vector,
)


class TestSteeringVector:
    def test_broadside_is_all_ones(self):
        np.testing.assert_allclose(steering_vector(2, 0.0), np.ones(2))

    def test_endfire_alternates_sign(self):
        np.testing.assert_allclose(
            steering_vector(4, 1.0), [1, -1, 1, -1], atol=1e-15
        )

    def test_entry_matches_direct_evaluation(self):
        # exp(j*pi*k*omega) at k=3, omega=-0.7
        v = steering_vector(8, -0.7)
        expected = cmath.exp(-1j * 2.1 * math.pi)
        assert v[3] == pytest.approx(expected, rel=1e-14)

    def test_squared_norm_equals_antenna_count(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n = int(rng.integers(1, 257))
            omega = float(rng.uniform(-1, 1))
            v = steering_vector(n, omega)
            assert np.sum(np.abs(v) ** 2) == pytest.approx(n, abs=1e-12 * n)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            steering_vector(0, 0.5)
        with pytest.raises(ValueError):
            steering_vector(8, 1.5)
        with pytest.raises(ValueError):
            steering_vector(8, float("nan"))


class TestEffectiveChannel:
    def test_single_path_passthrough(self):
        ch = MultipathChannel(np.array([0.9 + 0j]), np.array([-0.7]), 16)
        eff = effective_channel(ch)
        assert eff.coefficient == 0.9 + 0j
        assert eff.cos_aoa == -0.7

    def test_selects_largest_modulus(self):
        ch = MultipathChannel(
            np.array([0.2 + 0j, -0.9j]), np.array([0.5, -0.7]), 16
        )
        eff = effective_channel(ch)
        assert eff.cos_aoa == -0.7
        assert abs(eff.coefficient) == pytest.approx(0.9)

    def test_los_style_draw_selects_first_path(self):
        # dominant unit-power path followed by weak scattered paths
        ch = MultipathChannel(
            np.array([1.0 + 0j, 0.17j, -0.18 + 0j, 0.12 + 0j]),
            np.array([0.3, -0.5, 0.8, -0.1]),
            32,
        )
        assert effective_channel(ch).cos_aoa == 0.3

    def test_tie_breaks_to_lowest_index(self):
        ch = MultipathChannel(
            np.array([0.5 + 0j, 0.5j, 0.3 + 0j]), np.array([0.1, 0.2, 0.3]), 8
        )
        assert effective_channel(ch).cos_aoa == 0.1

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            MultipathChannel(np.array([]), np.array([]), 8)
        with pytest.raises(ValueError):
            MultipathChannel(np.array([1.0 + 0j]), np.array([1.5]), 8)
        with pytest.raises(ValueError):
            MultipathChannel(np.array([complex("nan")]), np.array([0.0]), 8)
        with pytest.raises(ValueError):
            EffectiveChannel(0.0, 0.5, 8)


class TestBeamGain:
    def test_aligned_beamforming(self):
        n = 16
        a = steering_vector(n, 0.3)
        h = 0.9 * a
        w = a / math.sqrt(n)
        assert beam_gain(h, w) == pytest.approx(0.81 * n, rel=1e-12)

    def test_orthogonal_gives_zero(self):
        n = 8
        # directions exactly one null spacing apart are orthogonal
        h = steering_vector(n, 0.0)
        w = steering_vector(n, 2.0 / n) / math.sqrt(n)
        assert beam_gain(h, w) == pytest.approx(0.0, abs=1e-24)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            beam_gain(np.ones(4), np.ones(5))

    def test_cauchy_schwarz(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(2, 33))
            h = rng.normal(size=n) + 1j * rng.normal(size=n)
            w = rng.normal(size=n) + 1j * rng.normal(size=n)
            lhs = beam_gain(h, w)
            rhs = np.sum(np.abs(h) ** 2) * np.sum(np.abs(w) ** 2)
            assert lhs <= rhs * (1 + 1e-12)

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            n = int(rng.integers(2, 65))
            h = rng.normal(size=n) + 1j * rng.normal(size=n)
            w = rng.normal(size=n) + 1j * rng.normal(size=n)
            phi = rng.uniform(0, 2 * np.pi)
            g0 = beam_gain(h, w)
            g1 = beam_gain(h, w * np.exp(1j * phi))
            assert g1 == pytest.approx(g0, rel=1e-10)


class TestBeamPattern:
    def test_peak_at_pointing_direction(self):
        n = 32
        w = steering_vector(n, 0.25) / math.sqrt(n)
        pat = beam_pattern(w, [0.25])
        assert pat[0, 1] == pytest.approx(n, rel=1e-12)

    def test_first_null_one_beamwidth_away(self):
        n = 32
        omega0 = 0.25
        w = steering_vector(n, omega0) / math.sqrt(n)
        pat = beam_pattern(w, [omega0 + 2.0 / n])
        assert pat[0, 1] < 1e-9

    def test_pattern_bounded_by_antenna_count(self):
        rng = np.random.default_rng(7)
        n = 16
        # any unit-norm vector: Cauchy-Schwarz caps the pattern at N
        w = rng.normal(size=n) + 1j * rng.normal(size=n)
        w /= np.linalg.norm(w)
        pat = beam_pattern(w, pattern_grid(1001))
        assert pat.shape == (1001, 2)
        assert np.all(pat[:, 1] <= n * (1 + 1e-12))

    def test_grid_validation(self):
        w = steering_vector(4, 0.0) / 2.0
        with pytest.raises(ValueError):
            beam_pattern(w, [])
        with pytest.raises(ValueError):
            beam_pattern(w, [0.0, 1.2])
        with pytest.raises(ValueError):
            pattern_grid(0)
