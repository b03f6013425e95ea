"""Channel realization sampling: span, profile moments, serialization."""

import numpy as np
import numpy.testing as npt
import pytest

from medbandsim import (
    BandClass,
    MultipathChannel,
    classify_band,
    delay_spread,
    pds,
    sample_channel,
    sample_delays,
    sample_gains,
)


class TestSampleDelays:
    @pytest.mark.parametrize("seed", [0, 1, 7])
    def test_span_is_exact(self, seed):
        tm = 3e-7
        taus = sample_delays(10, tm, np.random.default_rng(seed))
        assert taus.shape == (10,)
        assert taus[0] == 0.0
        assert taus[-1] == tm
        assert np.all(np.diff(taus) >= 0.0)
        assert np.all((taus >= 0.0) & (taus <= tm))

    def test_degenerate_cases(self):
        rng = np.random.default_rng(0)
        npt.assert_array_equal(sample_delays(1, 3e-7, rng), [0.0])
        npt.assert_array_equal(sample_delays(10, 0.0, rng), np.zeros(10))

    def test_rejects_bad_arguments(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_delays(0, 3e-7, rng)
        with pytest.raises(ValueError):
            sample_delays(10, -1e-9, rng)


class TestSampleGains:
    def test_uniform_profile_moments(self):
        # kappa=0: every path has average power 1/N.  |gamma|^2 is
        # exponential with mean 1/N, so the mean over M draws sits within
        # 4 * (1/N) / sqrt(M) of it.
        n, m = 10, 4000
        rng = np.random.default_rng(42)
        power = np.zeros(n)
        for _ in range(m):
            power += np.abs(sample_gains(n, 0.0, rng)) ** 2
        power /= m
        npt.assert_allclose(power, 1.0 / n, atol=4.0 * (1.0 / n) / np.sqrt(m))

    def test_decaying_profile_moments(self):
        n, m, kappa = 5, 4000, 0.5
        alpha = np.exp(-kappa * np.arange(1, n + 1))
        expected = alpha**2 / np.sum(alpha**2)
        rng = np.random.default_rng(3)
        power = np.zeros(n)
        for _ in range(m):
            power += np.abs(sample_gains(n, kappa, rng)) ** 2
        power /= m
        npt.assert_allclose(power, expected, atol=4.0 * np.max(expected) / np.sqrt(m))

    def test_total_average_power_is_one(self):
        m = 4000
        rng = np.random.default_rng(11)
        total = np.mean([np.sum(np.abs(sample_gains(10, 0.0, rng)) ** 2) for _ in range(m)])
        # var(sum |gamma|^2) = sum alpha^4 = 0.1 for the uniform profile
        assert abs(total - 1.0) < 4.0 * np.sqrt(0.1 / m)

    def test_components_are_balanced(self):
        # Real and imaginary parts carry half the power each.
        rng = np.random.default_rng(9)
        draws = np.concatenate([sample_gains(10, 0.0, rng) for _ in range(2000)])
        re_power = np.mean(draws.real**2)
        im_power = np.mean(draws.imag**2)
        npt.assert_allclose(re_power, 0.05, rtol=0.1)
        npt.assert_allclose(im_power, 0.05, rtol=0.1)
        assert abs(np.mean(draws.real * draws.imag)) < 0.005

    def test_rejects_bad_arguments(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            sample_gains(0, 0.0, rng)
        with pytest.raises(ValueError):
            sample_gains(10, -0.1, rng)


class TestSampleChannel:
    def test_seeded_draws_repeat(self):
        a = sample_channel(10, 3e-7, 0.0, np.random.default_rng(5))
        b = sample_channel(10, 3e-7, 0.0, np.random.default_rng(5))
        npt.assert_array_equal(a.taus, b.taus)
        npt.assert_array_equal(a.gammas, b.gammas)

    def test_zero_spread_collapses_delays(self):
        ch = sample_channel(10, 0.0, 0.0, np.random.default_rng(5))
        npt.assert_array_equal(ch.taus, np.zeros(10))
        assert np.any(ch.gammas != 0.0)


class TestMultipathChannel:
    def test_validation(self):
        with pytest.raises(ValueError):
            MultipathChannel(taus=np.array([1e-7, 2e-7]), gammas=np.ones(2))
        with pytest.raises(ValueError):
            MultipathChannel(taus=np.array([0.0, 2e-7, 1e-7]), gammas=np.ones(3))
        with pytest.raises(ValueError):
            MultipathChannel(taus=np.array([0.0, 1e-7]), gammas=np.ones(3))
        with pytest.raises(ValueError):
            MultipathChannel(taus=np.array([]), gammas=np.array([]))

    def test_json_round_trip_is_exact(self):
        ch = sample_channel(7, 2.5e-7, 0.3, np.random.default_rng(21))
        back = MultipathChannel.from_dict(ch.to_dict())
        npt.assert_array_equal(back.taus, ch.taus)
        npt.assert_array_equal(back.gammas, ch.gammas)
        assert back.kappa == ch.kappa

    def test_from_dict_defaults_kappa(self):
        ch = MultipathChannel.from_dict({"taus": [0.0], "gammas": [[1.0, 0.0]]})
        assert ch.kappa == 0.0
        assert ch.n_paths == 1


class TestDescriptors:
    def test_delay_spread_uses_first_listed_reference(self):
        npt.assert_allclose(delay_spread(np.array([0.3e-6, 0.0, 0.1e-6])), 0.3e-6)
        npt.assert_allclose(delay_spread(np.array([0.0, 0.1e-6, 0.3e-6])), 0.3e-6)
        assert delay_spread(np.array([0.0])) == 0.0

    def test_pds(self):
        npt.assert_allclose(pds(0.3e-6, 0.5e-6), 60.0, rtol=1e-12)
        assert pds(0.0, 0.5e-6) == 0.0
        with pytest.raises(ValueError):
            pds(0.3e-6, 0.0)

    def test_band_boundaries(self):
        ts = 5e-7
        assert classify_band(0.0, ts) is BandClass.NARROWBAND
        assert classify_band(0.1 * ts, ts) is BandClass.NARROWBAND
        assert classify_band(0.11 * ts, ts) is BandClass.MEDIUMBAND
        assert classify_band(0.99 * ts, ts) is BandClass.MEDIUMBAND
        assert classify_band(ts, ts) is BandClass.BROADBAND
        assert classify_band(2.0 * ts, ts) is BandClass.BROADBAND
