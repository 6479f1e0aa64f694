"""Monte-Carlo estimator: determinism, consistency, and cross-validation."""

import math

import numpy as np
import pytest

from fasris import analysis, channel, montecarlo, optimize
from fasris.channel import ChannelRealization
from fasris.errors import ValidationError
from fasris.montecarlo import McSpec, best_port_snr, empirical_outage, trial_rng


def _setup(n=4, m=4, k=1.0, mu_sq=0.5, seed=7, **kw):
    cfg = channel.SystemConfig(N=n, M=m, K=k, W=1.0, **kw)
    los = channel.generate_los(m, np.random.default_rng(seed))
    phases = optimize.optimal_phases(los.h_bar, los.g_bar)
    part = channel.bdma_partition(np.ones((n, n)), policy="explicit",
                                  sizes=[n], mu_sq=mu_sq)
    return cfg, part, los, phases


class TestBestPortSnr:
    def test_unit_gain_equal_powers(self):
        real = ChannelRealization(np.array([1.0 + 0.0j]))
        assert best_port_snr(real, -90.0, -90.0) == 1.0

    def test_duplication_invariance(self):
        g = np.array([0.5 + 0.1j, 0.2 - 0.4j])
        a = best_port_snr(ChannelRealization(g), 10.0, -100.0)
        b = best_port_snr(ChannelRealization(np.tile(g, 3)), 10.0, -100.0)
        assert a == b

    def test_scaling_law(self):
        g = np.array([0.5 + 0.1j, 0.2 - 0.4j, 0.9 + 0.0j])
        base = best_port_snr(ChannelRealization(g), 0.0, -100.0)
        scaled = best_port_snr(ChannelRealization(3.0 * g), 0.0, -100.0)
        assert scaled == pytest.approx(9.0 * base, rel=1e-12)
        assert np.argmax(np.abs(g)) == np.argmax(np.abs(3.0 * g))


class TestMcSpec:
    def test_validation(self):
        with pytest.raises(ValidationError):
            McSpec(trials=0)
        with pytest.raises(ValidationError):
            McSpec(batch=0)
        with pytest.raises(ValidationError):
            McSpec(model="other")


class TestEmpiricalOutage:
    def test_zero_rate_never_outage(self):
        cfg, part, los, phases = _setup()
        cfg = channel.SystemConfig(N=4, M=4, K=1.0, W=1.0, R=0.0)
        est = empirical_outage(cfg, part, los, phases, McSpec(trials=500, seed=1))
        assert est.outage == 0.0
        assert est.ci_halfwidth == 0.0

    def test_zero_power_always_outage(self):
        cfg, part, los, phases = _setup()
        cfg = channel.SystemConfig(N=4, M=4, K=1.0, W=1.0, P=-math.inf, R=5.0)
        est = empirical_outage(cfg, part, los, phases, McSpec(trials=500, seed=1))
        assert est.outage == 1.0

    def test_batch_size_invariance(self):
        # counter-based per-trial streams: batching cannot change the result
        cfg, part, los, phases = _setup()
        ests = [
            empirical_outage(cfg, part, los, phases,
                             McSpec(trials=3000, seed=42, batch=b))
            for b in (1, 7, 256, 3000)
        ]
        assert all(e == ests[0] for e in ests)

    def test_bit_identical_reruns(self):
        cfg, part, los, phases = _setup()
        mc = McSpec(trials=2000, seed=5)
        a = empirical_outage(cfg, part, los, phases, mc)
        b = empirical_outage(cfg, part, los, phases, mc)
        assert a == b

    def test_rate_and_amplitude_tests_agree(self):
        # per-trial booleans from log2(1+SNR) < R and from the amplitude
        # threshold are identical
        cfg, part, los, phases = _setup()
        samples = montecarlo.amax_sq_samples(cfg, part, los, phases,
                                             McSpec(trials=5000, seed=11))
        ratio = 10.0 ** ((cfg.P - cfg.noise_power) / 10.0)
        gamma = (2.0**cfg.R - 1.0) * 10.0 ** ((cfg.noise_power - cfg.P) / 10.0)
        via_rate = np.log2(1.0 + ratio * samples) < cfg.R
        via_amp = samples < gamma
        assert np.array_equal(via_rate, via_amp)

    def test_power_monotonicity(self):
        # +5 dB never raises the estimate by more than 2 half-widths
        cfg, part, los, phases = _setup()
        base = dict(N=4, M=4, K=1.0, W=1.0, R=5.0)
        for p in (-12.0, -8.0, -4.0, 0.0):
            lo_p = channel.SystemConfig(P=p, **base)
            hi_p = channel.SystemConfig(P=p + 5.0, **base)
            mc = McSpec(trials=20_000, seed=17)
            e_lo = empirical_outage(lo_p, part, los, phases, mc)
            e_hi = empirical_outage(hi_p, part, los, phases, mc)
            assert e_hi.outage <= e_lo.outage + 2.0 * e_lo.ci_halfwidth

    def test_ci_formula(self):
        cfg, part, los, phases = _setup()
        est = empirical_outage(cfg, part, los, phases, McSpec(trials=4000, seed=3))
        expect = 1.96 * math.sqrt(est.outage * (1.0 - est.outage) / est.trials_used)
        assert est.ci_halfwidth == pytest.approx(expect, rel=1e-12)


class TestCrossValidation:
    def test_block_mc_matches_bdma(self):
        # the analytic quadrature is the cross-oracle for the block sampler,
        # checked at three standard errors with a million trials
        cfg, part, los, phases = _setup()
        stats = analysis.cascaded_stats(cfg, los, phases)
        # choose P so the threshold sits at sigma_bar_sq (visible outage)
        p_dbm = cfg.noise_power - 10.0 * math.log10(stats.sigma_bar_sq / 31.0)
        cfg = channel.SystemConfig(N=4, M=4, K=1.0, W=1.0, P=p_dbm, R=5.0)
        mc = McSpec(trials=1_000_000, seed=99)
        est = empirical_outage(cfg, part, los, phases, mc)
        q = analysis.OutageQuery(stats.sigma_bar_sq, part, stats)
        pb = analysis.outage_bdma(q)
        assert abs(pb - est.outage) <= 3.0 * est.ci_halfwidth

    def test_toeplitz_identity_matches_iae(self):
        # uncorrelated ports: the Toeplitz simulator against the closed form
        # [1 - Q1]^N, exact for independent ports
        n = 6
        cfg = channel.SystemConfig(N=n, M=5, K=1.0, W=1.0)
        los = channel.generate_los(5, np.random.default_rng(13))
        phases = optimize.optimal_phases(los.h_bar, los.g_bar)
        stats = analysis.cascaded_stats(cfg, los, phases)
        gamma = 7.0 * stats.sigma_bar_sq
        p_dbm = cfg.noise_power - 10.0 * math.log10(gamma / 31.0)
        cfg = channel.SystemConfig(N=n, M=5, K=1.0, W=1.0, P=p_dbm, R=5.0)
        samples = _identity_toeplitz_samples(cfg, los, phases, trials=200_000, seed=31)
        est = montecarlo.estimate_from_samples(samples, gamma)
        expect = analysis.outage_upper(n, stats, gamma)
        assert abs(expect - est.outage) <= 3.0 * est.ci_halfwidth


def _identity_toeplitz_samples(cfg, los, phases, trials, seed):
    out = np.empty(trials)
    sigma = np.eye(cfg.N)
    for t in range(trials):
        real = channel.sample_toeplitz_channels(cfg, sigma, los, phases,
                                                trial_rng(seed, t))
        out[t] = np.max(np.abs(real.port_gains) ** 2)
    return out
