"""Analytic outage expressions: examples, bounds, limits, invariants."""

import math

import numpy as np
import pytest

from fasris import analysis, channel, optimize
from fasris.analysis import (
    CascadedStatistics,
    OutageQuery,
    cascaded_los_gain,
    diversity_order_estimate,
    normalized_threshold,
    outage_approx_for_design,
    outage_asymptotic,
    outage_bdma,
    outage_bdma_eval,
    outage_lower,
    outage_upper,
    scatter_variance,
)
from fasris.errors import DomainError, ValidationError
from fasris.quadrature import QuadratureSpec

# extended-precision oracle: 31 * 10^-11.8 (R=5, P=14 dBm, noise -104 dBm)
GAMMA_TH_ORACLE = 4.9131688966294518041e-11


def _part(sizes, mu):
    return channel.CorrelationPartition(tuple(sizes), tuple([mu] * len(sizes)))


def _stats(v, s=1.0):
    # LoS gain v and threshold are specified in units of sqrt(sigma_bar_sq)
    return CascadedStatistics(eta=v * math.sqrt(s), sigma_bar_sq=s)


class TestNormalizedThreshold:
    def test_zero_rate(self):
        assert normalized_threshold(0.0, 14.0, -104.0) == 0.0

    def test_unit_budget(self):
        assert normalized_threshold(1.0, -90.0, -90.0) == pytest.approx(1.0, rel=1e-15)

    def test_reference_threshold_value(self):
        got = normalized_threshold(5.0, 14.0, -104.0)
        assert got == pytest.approx(GAMMA_TH_ORACLE, rel=1e-13)

    def test_negative_rate_rejected(self):
        with pytest.raises(ValidationError):
            normalized_threshold(-1.0, 0.0, 0.0)


class TestScatterVariance:
    def test_unit_case(self):
        assert scatter_variance(1, 1.0, 1.0, 0.0) == 1.0

    def test_linear_in_m(self):
        assert scatter_variance(8, 0.3, 0.2, 1.5) == pytest.approx(
            2.0 * scatter_variance(4, 0.3, 0.2, 1.5), rel=1e-15)

    def test_reference_style_inputs(self):
        # hand arithmetic: 9 * 1e-4 * 2e-6 / 2
        assert scatter_variance(9, 1e-4, 2e-6, 1.0) == pytest.approx(9e-10, rel=1e-14)


class TestCascadedLosGain:
    def _draw(self, m=9, seed=1):
        los = channel.generate_los(m, np.random.default_rng(seed))
        return los.h_bar, los.g_bar

    def test_zero_k(self):
        h, g = self._draw()
        ph = optimize.optimal_phases(h, g)
        assert cascaded_los_gain(h, ph, g, 1.0, 1.0, 0.0) == 0.0

    def test_coherent_sum(self):
        h, g = self._draw()
        ph = optimize.optimal_phases(h, g)
        eta = cascaded_los_gain(h, ph, g, 0.5, 0.25, 3.0)
        expect = math.sqrt(0.5 * 3.0 / 4.0) * math.sqrt(0.25) * 9
        assert abs(eta) == pytest.approx(expect, rel=1e-12)

    def test_triangle_inequality(self):
        h, g = self._draw()
        coherent = abs(cascaded_los_gain(h, optimize.optimal_phases(h, g), g, 1.0, 1.0, 1.0))
        rng = np.random.default_rng(5)
        for _ in range(20):
            ph = optimize.random_phases(9, rng)
            assert abs(cascaded_los_gain(h, ph, g, 1.0, 1.0, 1.0)) <= coherent + 1e-12

    def test_length_mismatch(self):
        h, g = self._draw()
        with pytest.raises(ValidationError):
            cascaded_los_gain(h[:5], optimize.optimal_phases(h, g), g, 1, 1, 1)


class TestOutageBdma:
    def test_zero_threshold(self):
        q = OutageQuery(0.0, _part([4], 0.5), _stats(2.0))
        assert outage_bdma(q) == 0.0

    def test_certain_outage(self):
        q = OutageQuery(1e6, _part([4], 0.5), _stats(2.0))
        assert outage_bdma(q) == pytest.approx(1.0, abs=1e-9)

    def test_single_port_block_split_invariance(self):
        # with L=1 the block marginal cannot depend on the shared/private split
        vals = [outage_bdma(OutageQuery(1.3, _part([1], m2), _stats(1.5)))
                for m2 in (0.1, 0.4, 0.9)]
        assert max(vals) - min(vals) <= 1e-9

    def test_matches_rician_cdf_for_single_port(self):
        # one port: outage is the Rician CDF at the threshold
        from fasris import specfun

        q = OutageQuery(1.3, _part([1], 0.5), _stats(1.5))
        expect = specfun.one_minus_marcum_q1(math.sqrt(2.0) * 1.5, math.sqrt(2.0 * 1.3))
        assert outage_bdma(q) == pytest.approx(expect, rel=1e-9)

    def test_mu_zero_rejected(self):
        with pytest.raises(DomainError):
            outage_bdma(OutageQuery(1.0, _part([4], 0.0), _stats(1.0)))

    def test_quadrature_self_consistency(self):
        # halving tolerances moves the value by at most 10x the error estimate
        q = OutageQuery(0.8, _part([3, 2], 0.7), _stats(1.2))
        loose = QuadratureSpec(rel_tol=1e-6, abs_tol=1e-300)
        tight = QuadratureSpec(rel_tol=5e-7, abs_tol=1e-300)
        e1 = outage_bdma_eval(q, loose)
        e2 = outage_bdma_eval(q, tight)
        assert abs(e1.value - e2.value) <= 10.0 * max(e1.est_abs_err, 1e-16)

    def test_underflow_flag(self):
        part = channel.CorrelationPartition(tuple([1] * 50), tuple([0.5] * 50))
        ev = outage_bdma_eval(OutageQuery(1e-14, part, _stats(6.0)))
        assert ev.value == 0.0 and ev.underflow


class TestOutageUpper:
    def test_zero_threshold(self):
        assert outage_upper(3, _stats(1.0), 0.0) == 0.0

    def test_rayleigh_special_case(self):
        # B=1, eta=0: 1 - exp(-gamma/sigma^2) via the Q1(0, b) identity
        s = 2.5
        g = 1.7
        got = outage_upper(1, CascadedStatistics(0.0, s), g)
        assert got == pytest.approx(1.0 - math.exp(-g / s), rel=1e-12)

    def test_product_form(self):
        st = _stats(1.0)
        one = outage_upper(1, st, 0.9)
        assert outage_upper(2, st, 0.9) == pytest.approx(one**2, rel=1e-12)

    def test_b_validation(self):
        with pytest.raises(ValidationError):
            outage_upper(0, _stats(1.0), 1.0)


class TestOutageLower:
    def test_zero_threshold(self):
        assert outage_lower(OutageQuery(0.0, _part([2, 2], 0.5), _stats(1.0))) == 0.0

    def test_single_port_closed_form(self):
        # eta=0, B=1, L=1: (1-mu^2)(1 - exp(-gamma/(sigma^2(1-mu^2))))
        m2, g, s = 0.3, 0.6, 1.4
        q = OutageQuery(g, _part([1], m2), CascadedStatistics(0.0, s))
        expect = (1 - m2) * (1.0 - math.exp(-g / (s * (1 - m2))))
        assert outage_lower(q) == pytest.approx(expect, rel=1e-12)

    def test_bounds_bdma(self):
        for g in (0.05, 0.3, 1.0, 4.0):
            q = OutageQuery(g, _part([3, 3], 0.6), _stats(1.0))
            assert outage_lower(q) <= outage_bdma(q) + 1e-9

    def test_mu_zero_rejected(self):
        with pytest.raises(DomainError):
            outage_lower(OutageQuery(1.0, _part([2], 0.0), _stats(1.0)))

    def test_strict_common_mu(self):
        part = channel.CorrelationPartition((2, 2), (0.5, 0.7))
        q = OutageQuery(1.0, part, _stats(1.0))
        outage_lower(q)  # heterogeneous blocks allowed by default
        with pytest.raises(ValidationError):
            outage_lower(q, strict_common_mu=True)


class TestOutageAsymptotic:
    def test_monomial_scaling(self):
        # scaling gamma_th by 10 scales the result by 10^N exactly
        part = _part([3, 2, 2], 0.55)  # N = 7
        st = _stats(1.0)
        lo = outage_asymptotic(OutageQuery(1e-6, part, st))
        hi = outage_asymptotic(OutageQuery(1e-5, part, st))
        assert hi / lo == pytest.approx(10.0**7, rel=1e-9)

    def test_single_port_reduction(self):
        # eta=0, B=1, L=1 reduces to gamma_th / sigma_bar_sq
        s, g = 1.7, 1e-4
        q = OutageQuery(g, _part([1], 0.4), CascadedStatistics(0.0, s))
        assert outage_asymptotic(q) == pytest.approx(g / s, rel=1e-12)

    def test_agrees_with_lower_at_tiny_threshold(self):
        m2 = 0.5
        s = 1.0
        g = 1e-4 * s * (1.0 - m2)
        q = OutageQuery(g, _part([2, 2], m2), _stats(1.2, s))
        assert outage_asymptotic(q) == pytest.approx(outage_lower(q), rel=0.01)

    def test_clamped_to_unit_interval(self):
        q = OutageQuery(100.0, _part([4], 0.5), _stats(0.0))
        assert outage_asymptotic(q) == 1.0


class TestOutageApproxForDesign:
    def test_equals_bdma_when_eta_zero(self):
        # I0(0) = 1: dropping the Bessel factor is exact at eta = 0
        for g in (0.2, 1.0, 3.0):
            q = OutageQuery(g, _part([3, 2], 0.6), CascadedStatistics(0.0, 1.0))
            assert outage_approx_for_design(q) == pytest.approx(outage_bdma(q), rel=1e-8)

    def test_zero_threshold(self):
        assert outage_approx_for_design(OutageQuery(0.0, _part([2], 0.5), _stats(1.0))) == 0.0

    def test_nonincreasing_in_eta(self):
        part = _part([3, 2], 0.6)
        vals = [outage_approx_for_design(OutageQuery(0.9, part, _stats(v)))
                for v in np.linspace(0.0, 4.0, 9)]
        assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))


class TestDiversityOrder:
    def test_exact_on_asymptote(self):
        part = _part([2, 2], 0.5)  # N=4
        st = _stats(1.0)
        gammas = np.geomspace(1e-2, 1e-4, 9)
        curve = [(g, outage_asymptotic(OutageQuery(g, part, st))) for g in gammas]
        assert diversity_order_estimate(curve) == pytest.approx(4.0, abs=1e-6)

    def test_quadratic_curve(self):
        gammas = np.geomspace(1.0, 1e-3, 16)
        curve = [(g, 0.37 * g * g) for g in gammas]
        assert diversity_order_estimate(curve) == pytest.approx(2.0, abs=1e-9)

    def test_bdma_tail_slope(self):
        part = _part([4], 0.5)
        st = _stats(2.0)
        gammas = np.geomspace(1e-2, 1e-4, 9) * st.sigma_bar_sq
        curve = [(g, outage_bdma(OutageQuery(g, part, st))) for g in gammas]
        assert 3.6 <= diversity_order_estimate(curve) <= 4.4

    def test_validation(self):
        with pytest.raises(ValidationError):
            diversity_order_estimate([(1.0, 0.1)])
        with pytest.raises(ValidationError):
            diversity_order_estimate([(1.0, 0.1), (2.0, 0.2)])  # ascending
        with pytest.raises(DomainError):
            diversity_order_estimate([(2.0, 0.1), (1.0, 0.0)])


class TestOrderingAndLimits:
    def test_ordering_on_common_mu_queries(self):
        rng = np.random.default_rng(99)
        for _ in range(30):
            nblocks = int(rng.integers(1, 4))
            sizes = [int(rng.integers(1, 4)) for _ in range(nblocks)]
            mu = float(rng.uniform(0.05, 0.95))
            st = _stats(float(rng.uniform(0.0, 3.0)))
            g = float(rng.uniform(0.01, 5.0))
            q = OutageQuery(g, _part(sizes, mu), st)
            lo = outage_lower(q)
            mid = outage_bdma(q)
            hi = outage_upper(len(sizes), st, g)
            assert lo <= mid + 1e-6
            assert mid <= hi + 1e-6

    def test_bdma_converges_to_upper_as_mu_to_one(self):
        st = _stats(1.5)
        g = 1.1
        q = OutageQuery(g, _part([3, 2], 1.0 - 1e-6), st)
        up = outage_upper(2, st, g)
        assert outage_bdma(q) == pytest.approx(up, rel=0.01)

    def test_all_ops_in_unit_interval_and_monotone(self):
        # 20 grid points per decade over three decades
        part = _part([2, 3], 0.6)
        st = _stats(1.0)
        gammas = np.geomspace(1e-3, 1.0, 61)
        for fn in (
            lambda q: outage_bdma(q),
            lambda q: outage_lower(q),
            lambda q: outage_asymptotic(q),
            lambda q: outage_approx_for_design(q),
            lambda q: outage_upper(part.B, st, q.gamma_th),
        ):
            vals = [fn(OutageQuery(float(g), part, st)) for g in gammas]
            assert all(0.0 <= v <= 1.0 for v in vals)
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
