"""Closed-form pulse family against independent numerical oracles."""

import numpy as np
import numpy.testing as npt
import pytest
from scipy.integrate import quad

from medbandsim import PulseConfig, autocorr, rc_pulse, rc_spectrum, srrc_pulse
from medbandsim.pulses import SINGULARITY_TOL, srrc_rx_pulse, srrc_tx_pulse

# An epsilon approach to a removable singularity should land this close.
CONTINUITY_TOL = 5e-6
NYQUIST_TOL = 1e-12

BETAS = [0.22, 0.5, 1.0]


def _cfg(ts=1.0, beta=0.22, span_k=6):
    return PulseConfig(ts=ts, beta=beta, span_k=span_k)


class TestPulseConfig:
    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            PulseConfig(ts=0.0, beta=0.22)
        with pytest.raises(ValueError):
            PulseConfig(ts=1.0, beta=0.0)
        with pytest.raises(ValueError):
            PulseConfig(ts=1.0, beta=1.5)
        with pytest.raises(ValueError):
            PulseConfig(ts=1.0, beta=0.22, span_k=0)

    def test_accepts_full_rolloff(self):
        PulseConfig(ts=1.0, beta=1.0)


class TestRcPulse:
    @pytest.mark.parametrize("beta", BETAS)
    def test_unity_at_origin(self, beta):
        assert rc_pulse(0.0, _cfg(beta=beta)) == 1.0

    @pytest.mark.parametrize("beta", BETAS)
    @pytest.mark.parametrize("ts", [1.0, 5e-7])
    def test_nyquist_zeros(self, beta, ts):
        cfg = _cfg(ts=ts, beta=beta)
        k = np.arange(1, cfg.span_k + 1)
        vals = rc_pulse(np.concatenate([k, -k]) * ts, cfg)
        npt.assert_allclose(vals, 0.0, atol=NYQUIST_TOL)

    @pytest.mark.parametrize("beta", BETAS)
    def test_singular_point_is_the_analytic_limit(self, beta):
        # The branch value must be where the generic formula is heading.
        cfg = _cfg(beta=beta)
        t_sing = 1.0 / (2.0 * beta)
        at = rc_pulse(t_sing, cfg)
        near = rc_pulse(t_sing + 1e-6, cfg)
        far = rc_pulse(t_sing + 1e-4, cfg)
        assert abs(near - at) < CONTINUITY_TOL
        assert abs(near - at) < abs(far - at)

    def test_singularity_routing_window(self):
        cfg = _cfg(beta=0.22)
        t_sing = 1.0 / (2.0 * 0.22)
        inside = rc_pulse(t_sing + 0.4 * SINGULARITY_TOL * cfg.ts, cfg)
        assert inside == rc_pulse(t_sing, cfg)

    @pytest.mark.parametrize("ts", [1.0, 5e-7])
    def test_truncated_outside_span(self, ts):
        cfg = _cfg(ts=ts)
        assert rc_pulse((cfg.span_k + 0.001) * ts, cfg) == 0.0
        assert rc_pulse(-(cfg.span_k + 0.001) * ts, cfg) == 0.0
        assert rc_pulse((cfg.span_k - 0.5) * ts, cfg) != 0.0

    def test_even_symmetry(self):
        cfg = _cfg()
        t = np.linspace(0.0, 7.0, 173)
        npt.assert_array_equal(rc_pulse(t, cfg), rc_pulse(-t, cfg))

    def test_scalar_and_array_agree(self):
        cfg = _cfg(ts=5e-7)
        t = np.array([0.0, 1.3e-7, -4.2e-7, 3.1e-6])
        out = rc_pulse(t, cfg)
        assert isinstance(rc_pulse(float(t[1]), cfg), float)
        npt.assert_array_equal(out, [rc_pulse(float(v), cfg) for v in t])


class TestRcSpectrum:
    @pytest.mark.parametrize("ts", [1.0, 5e-7])
    @pytest.mark.parametrize("beta", [0.22, 0.5])
    def test_band_structure(self, ts, beta):
        cfg = _cfg(ts=ts, beta=beta)
        f_flat = (1.0 - beta) / (2.0 * ts)
        f_stop = (1.0 + beta) / (2.0 * ts)
        assert rc_spectrum(0.0, cfg) == ts
        assert rc_spectrum(0.99 * f_flat, cfg) == ts
        npt.assert_allclose(rc_spectrum(f_stop, cfg), 0.0, atol=1e-25)
        assert rc_spectrum(1.01 * f_stop, cfg) == 0.0
        # Halfway through the roll-off the cosine term contributes ts/2.
        mid = 0.5 * (f_flat + f_stop)
        npt.assert_allclose(rc_spectrum(mid, cfg), 0.5 * ts, rtol=1e-12)

    def test_even_symmetry(self):
        cfg = _cfg(ts=5e-7)
        f = np.linspace(0.0, 1.3 / cfg.ts, 257)
        npt.assert_array_equal(rc_spectrum(f, cfg), rc_spectrum(-f, cfg))

    @pytest.mark.parametrize("ts", [1.0, 5e-7])
    @pytest.mark.parametrize("beta", [0.22, 0.5])
    def test_unit_area(self, ts, beta):
        cfg = _cfg(ts=ts, beta=beta)
        f_flat = (1.0 - beta) / (2.0 * ts)
        f_stop = (1.0 + beta) / (2.0 * ts)
        total, _ = quad(
            lambda f: rc_spectrum(f, cfg),
            -f_stop,
            f_stop,
            points=[-f_stop, -f_flat, f_flat, f_stop],
            limit=200,
        )
        assert abs(total - 1.0) < 1e-9


class TestSrrcPulse:
    # The printed branch constants follow the unit-symbol-period
    # convention, so continuity against the generic branch holds at ts=1.

    @pytest.mark.parametrize("beta", [0.22, 0.5])
    def test_origin_value(self, beta):
        cfg = _cfg(ts=1.0, beta=beta)
        expected = 1.0 + beta * (4.0 / np.pi - 1.0)
        assert srrc_pulse(0.0, cfg) == expected

    @pytest.mark.parametrize("beta", [0.22, 0.5])
    def test_branch_continuity_at_unit_period(self, beta):
        cfg = _cfg(ts=1.0, beta=beta)
        for t_sing in (0.0, 1.0 / (4.0 * beta), -1.0 / (4.0 * beta)):
            at = srrc_pulse(t_sing, cfg)
            near = srrc_pulse(t_sing + 1e-6, cfg)
            assert abs(near - at) < CONTINUITY_TOL

    def test_even_symmetry(self):
        cfg = _cfg(ts=1.0)
        t = np.linspace(0.0, 8.0, 211)
        npt.assert_allclose(srrc_pulse(t, cfg), srrc_pulse(-t, cfg), atol=1e-14)

    def test_tx_rx_factor_scalings(self):
        cfg = _cfg(ts=5e-7)
        t = np.linspace(-3e-6, 3e-6, 101)
        base = srrc_pulse(t, cfg)
        npt.assert_allclose(srrc_tx_pulse(t, cfg), np.sqrt(cfg.ts) * base, rtol=1e-15)
        npt.assert_allclose(srrc_rx_pulse(t, cfg), base / np.sqrt(cfg.ts), rtol=1e-15)


def _rc_untruncated(x, beta):
    # Test-side reference: the combined pulse with no truncation window,
    # written independently of the library routine.
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        generic = np.sinc(x) * np.cos(np.pi * beta * x) / (1.0 - (2.0 * beta * x) ** 2)
    limit = (np.pi / 4.0) * np.sinc(1.0 / (2.0 * beta))
    return np.where(np.abs(np.abs(x) - 1.0 / (2.0 * beta)) < 1e-9, limit, generic)


class TestAutocorr:
    @pytest.mark.parametrize("beta", BETAS)
    def test_zero_lag_value(self, beta):
        assert autocorr(0.0, _cfg(beta=beta)) == 1.0 - beta / 4.0

    @pytest.mark.parametrize("beta", [0.22, 0.5])
    def test_singular_points_are_the_analytic_limits(self, beta):
        cfg = _cfg(beta=beta)
        for t_sing in (1.0 / (2.0 * beta), 1.0 / beta):
            for sign in (1.0, -1.0):
                at = autocorr(sign * t_sing, cfg)
                near = autocorr(sign * t_sing + 1e-6, cfg)
                assert abs(near - at) < CONTINUITY_TOL

    def test_even_symmetry(self):
        cfg = _cfg()
        tau = np.linspace(0.0, 9.0, 301)
        npt.assert_array_equal(autocorr(tau, cfg), autocorr(-tau, cfg))

    def test_not_truncated(self):
        # The pulse is windowed to |t| <= span_k*ts but the symbol-stream
        # autocorrelation keeps its tails.
        cfg = _cfg(ts=5e-7)
        tau = 8.0 * cfg.ts
        assert rc_pulse(tau, cfg) == 0.0
        assert autocorr(tau, cfg) != 0.0

    @pytest.mark.parametrize("ts", [1.0, 5e-7])
    @pytest.mark.parametrize("beta", [0.22, 0.5])
    def test_matches_pulse_correlation_integral(self, ts, beta):
        # R(tau) should equal (1/ts) * integral p(u) p(u + tau) du with the
        # untruncated pulse; midpoint rule, sampled nowhere near the
        # singular loci.  The full 200-point sweep lives in the acceptance
        # suite; this keeps a faster cross-parameter version.
        cfg = _cfg(ts=ts, beta=beta)
        halfspan, subdiv = 40, 400
        u = ((np.arange(2 * halfspan * subdiv) + 0.5) / subdiv - halfspan)
        p_u = _rc_untruncated(u, beta)
        lags = np.concatenate(
            [
                np.linspace(-3.0, 3.0, 25),
                [1.0 / (2.0 * beta), -1.0 / (2.0 * beta), 1.0 / beta, -1.0 / beta],
            ]
        )
        for lag in lags:
            integral = np.sum(p_u * _rc_untruncated(u + lag, beta)) / subdiv
            assert abs(integral - autocorr(lag * ts, cfg)) < 1e-6

    def test_matched_filter_identity_quick(self):
        # Convolving the two root pulses reproduces the combined pulse.
        cfg = _cfg(ts=1.0, beta=0.22)
        halfspan, subdiv = 30, 400
        u = (np.arange(2 * halfspan * subdiv) + 0.5) / subdiv - halfspan
        p_t = srrc_tx_pulse(u, cfg)
        for t in np.linspace(-5.5, 5.5, 21):
            conv = np.sum(p_t * srrc_rx_pulse(t - u, cfg)) / subdiv
            assert abs(conv - rc_pulse(t, cfg)) < 1e-4
