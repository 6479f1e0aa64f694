"""Closed-form and integral outage expressions for the cascaded link.

All outage operations work on two sufficient statistics of the cascade:
the deterministic LoS gain eta and the scatter variance sigma_bar_sq.
Internally everything is normalized by sqrt(sigma_bar_sq), so the
integrands live on an O(1) scale regardless of the physical path losses.

Per-block generalization: the published closed forms carry a single
correlation parameter mu^2; every product over blocks here accepts
per-block mu_b^2 and reduces to the common-mu formulas when all blocks
agree.  The exponential prefactor of the lower bound and of the design
approximation uses the mean of mu_b^2 for heterogeneous blocks;
``strict_common_mu=True`` rejects heterogeneous blocks instead.
"""

import math
from dataclasses import dataclass

import numpy as np

from fasris import backend
from fasris.channel import CorrelationPartition, LosChannels, SystemConfig
from fasris.errors import DomainError, NumericError, ValidationError
from fasris.quadrature import DEFAULT_QUADRATURE, QuadratureSpec, integrate

LOG_FLOOR = -745.0  # exp(-745) is the smallest positive normal-ish double


@dataclass(frozen=True)
class CascadedStatistics:
    """Sufficient statistics of the analytic cascade model."""

    eta: complex              # deterministic LoS gain (linear amplitude)
    sigma_bar_sq: float       # scatter variance (linear power)

    def __post_init__(self):
        if not (self.sigma_bar_sq > 0.0):
            raise ValidationError("sigma_bar_sq must be positive")


@dataclass(frozen=True)
class OutageQuery:
    """One outage evaluation point."""

    gamma_th: float           # amplitude-squared threshold (linear)
    partition: CorrelationPartition
    stats: CascadedStatistics

    def __post_init__(self):
        if not (self.gamma_th >= 0.0):
            raise ValidationError("gamma_th must be nonnegative")


@dataclass(frozen=True)
class OutageEval:
    """Outage value with quadrature error estimate and underflow flag."""

    value: float
    est_abs_err: float
    underflow: bool = False


def normalized_threshold(R: float, P_dbm: float, noise_dbm: float) -> float:
    """(2^R - 1) * 10^((noise_dbm - P_dbm)/10): the amplitude^2 outage threshold."""
    if not (R >= 0.0):
        raise ValidationError("R must be nonnegative")
    if R == 0.0:
        return 0.0
    return (2.0**R - 1.0) * 10.0 ** ((noise_dbm - P_dbm) / 10.0)


def scatter_variance(M: int, alpha: float, beta: float, K: float) -> float:
    """Variance M*alpha*beta/(K+1) of the CLT-approximated scattered cascade."""
    if M < 1 or not (alpha > 0.0 and beta > 0.0):
        raise ValidationError("M must be >= 1 and alpha, beta positive")
    if not (K >= 0.0):
        raise ValidationError("K must be nonnegative")
    return M * alpha * beta / (K + 1.0)


def cascaded_los_gain(h_bar, phases, g_bar, alpha: float, beta: float, K: float) -> complex:
    """sqrt(alpha K/(K+1)) * sum_m h_bar(m) e^{j theta_m} sqrt(beta) conj(g_bar(m))."""
    h = np.asarray(h_bar, dtype=complex)
    g = np.asarray(g_bar, dtype=complex)
    t = np.asarray(phases.thetas, dtype=float)
    if not (h.shape == g.shape == t.shape):
        raise ValidationError("h_bar, phases and g_bar must have equal length")
    coef = math.sqrt(alpha * K / (K + 1.0)) * math.sqrt(beta)
    return complex(coef * np.sum(h * np.exp(1j * t) * np.conj(g)))


def cascaded_stats(cfg: SystemConfig, los: LosChannels, phases) -> CascadedStatistics:
    """Sufficient statistics of a configured link under the given phases."""
    a, b = cfg.alpha(), cfg.beta()
    return CascadedStatistics(
        eta=cascaded_los_gain(los.h_bar, phases, los.g_bar, a, b, cfg.K),
        sigma_bar_sq=scatter_variance(cfg.M, a, b, cfg.K),
    )


def _normalized(q: OutageQuery):
    """(v, u): LoS gain and amplitude threshold in units of sqrt(sigma_bar_sq)."""
    s = q.stats.sigma_bar_sq
    return abs(q.stats.eta) / math.sqrt(s), math.sqrt(q.gamma_th / s)


def _check_mu_open_interval(part: CorrelationPartition):
    for m2 in part.block_mu_sq:
        if not (0.0 < m2 < 1.0):
            raise DomainError(f"block mu^2 must lie in (0, 1), got {m2}")


def _mean_mu_sq(part: CorrelationPartition, strict_common_mu: bool) -> float:
    mus = part.block_mu_sq
    if strict_common_mu and max(mus) - min(mus) > 1e-12:
        raise ValidationError("strict_common_mu: blocks have heterogeneous mu^2")
    return sum(mus) / len(mus)


def _product_eval(log_terms, errs, vals) -> OutageEval:
    """Combine per-block factors in the log domain with the underflow floor."""
    if any(v == 0.0 for v in vals):
        return OutageEval(0.0, 0.0, underflow=True)
    logp = sum(log_terms)
    if logp < LOG_FLOOR:
        return OutageEval(0.0, 0.0, underflow=True)
    value = math.exp(logp)
    est = value * sum(e / v for e, v in zip(errs, vals))
    return OutageEval(value, est, underflow=False)


def _clamped_factor(val: float, err: float, what: str) -> float:
    """Clamp a probability-valued factor to [0, 1] only within its error bar."""
    if val < 0.0:
        if -val <= err:
            return 0.0
        raise NumericError(f"{what} evaluated to {val:.3e} beyond its error estimate {err:.3e}")
    if val > 1.0:
        if val - 1.0 <= err:
            return 1.0
        raise NumericError(f"{what} evaluated to {val:.6e} beyond its error estimate {err:.3e}")
    return val


def outage_bdma_eval(q: OutageQuery, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> OutageEval:
    """Block-model outage with quadrature error estimate and underflow flag.

    Product over blocks of the Rician mixing density integrated against
    [1 - Q1]^(block size), each factor by adaptive quadrature on the
    truncated domain [0, v + truncation_sigmas * mu_b/sqrt(2)].
    """
    _check_mu_open_interval(q.partition)
    if q.gamma_th == 0.0:
        return OutageEval(0.0, 0.0)
    v, u = _normalized(q)
    log_terms, errs, vals = [], [], []
    for L, m2 in zip(q.partition.block_sizes, q.partition.block_mu_sq):
        w = math.sqrt(0.5 * m2)
        t_max = v + quad.truncation_sigmas * w
        # seed panels at the density bump around v and the threshold knee at u
        pts = (v - 4.0 * w, v - w, v + w, v + 4.0 * w, u)
        val, err = integrate(lambda t: backend.bdma_integrand(t, v, m2, L, u),
                             0.0, t_max, quad, breakpoints=pts)
        val = _clamped_factor(val, err, f"block factor (L={L}, mu^2={m2})")
        vals.append(val)
        errs.append(err)
        log_terms.append(math.log(val) if val > 0.0 else -math.inf)
    return _product_eval(log_terms, errs, vals)


def outage_bdma(q: OutageQuery, quad: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """Block-model outage probability (value only)."""
    return outage_bdma_eval(q, quad).value


def outage_upper(B: int, stats: CascadedStatistics, gamma_th: float) -> float:
    """Independent-antennas-equivalent upper bound [1 - Q1]^B."""
    if B < 1:
        raise ValidationError("B must be at least 1")
    if not (gamma_th >= 0.0):
        raise ValidationError("gamma_th must be nonnegative")
    if gamma_th == 0.0:
        return 0.0
    s = stats.sigma_bar_sq
    v = abs(stats.eta) / math.sqrt(s)
    u = math.sqrt(gamma_th / s)
    p = backend.marcum_q1_pair(math.sqrt(2.0) * v, math.sqrt(2.0) * u)[1]
    if p <= 0.0:
        return 0.0
    return math.exp(B * math.log(p))


def outage_lower(q: OutageQuery, strict_common_mu: bool = False) -> float:
    """Closed-form lower bound of the block-model outage.

    exp(-B |eta|^2/(sigma^2 mu^2)) * prod_b (1-mu_b^2)/(1+(L_b-1) mu_b^2)
    * [1 - exp(-gamma_th/(sigma^2 (1-mu_b^2)))]^{L_b}, accumulated in the
    log domain.  The prefactor's mu^2 is the block mean when blocks differ.
    """
    _check_mu_open_interval(q.partition)
    if q.gamma_th == 0.0:
        return 0.0
    v, u = _normalized(q)
    if u == 0.0:
        return 0.0
    mu_bar = _mean_mu_sq(q.partition, strict_common_mu)
    logp = -q.partition.B * v * v / mu_bar
    for L, m2 in zip(q.partition.block_sizes, q.partition.block_mu_sq):
        x = u * u / (1.0 - m2)
        bracket = -math.expm1(-x)
        if bracket <= 0.0:
            return 0.0
        logp += math.log1p(-m2) - math.log1p((L - 1) * m2)
        logp += L * math.log(bracket)
    if logp < LOG_FLOOR:
        return 0.0
    return math.exp(logp)


def outage_asymptotic(q: OutageQuery) -> float:
    """High-SNR asymptote: prod_b eta_b [gamma_th/(sigma^2 (1-mu_b^2))]^{L_b}.

    eta_b = (1-mu_b^2) exp(-|eta|^2/(sigma^2 mu_b^2)) / (1+(L_b-1) mu_b^2).
    A monomial of degree N in gamma_th; clamped to 1 outside its regime.
    """
    _check_mu_open_interval(q.partition)
    if q.gamma_th == 0.0:
        return 0.0
    v, u = _normalized(q)
    if u == 0.0:
        return 0.0
    logp = 0.0
    log_u2 = 2.0 * math.log(u)
    for L, m2 in zip(q.partition.block_sizes, q.partition.block_mu_sq):
        logp += math.log1p(-m2) - v * v / m2 - math.log1p((L - 1) * m2)
        logp += L * (log_u2 - math.log1p(-m2))
    if logp < LOG_FLOOR:
        return 0.0
    return min(1.0, math.exp(logp))


def outage_approx_for_design(
    q: OutageQuery,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    strict_common_mu: bool = False,
) -> float:
    """Phase-design approximation: the block-model outage with I0 set to one.

    exp(-B |eta|^2/(sigma^2 mu^2)) * prod_b int (2t/mu_b^2) e^{-t^2/mu_b^2}
    [1 - Q1]^{L_b} dt.  Decreases monotonically as |eta| grows, which is
    what makes the LoS-alignment phase design optimal for it.
    """
    return outage_approx_for_design_eval(q, quad, strict_common_mu).value


def outage_approx_for_design_eval(
    q: OutageQuery,
    quad: QuadratureSpec = DEFAULT_QUADRATURE,
    strict_common_mu: bool = False,
) -> OutageEval:
    """outage_approx_for_design with error estimate and underflow flag."""
    _check_mu_open_interval(q.partition)
    if q.gamma_th == 0.0:
        return OutageEval(0.0, 0.0)
    v, u = _normalized(q)
    mu_bar = _mean_mu_sq(q.partition, strict_common_mu)
    pre = -q.partition.B * v * v / mu_bar
    log_terms, errs, vals = [pre], [0.0], [1.0]
    for L, m2 in zip(q.partition.block_sizes, q.partition.block_mu_sq):
        w = math.sqrt(0.5 * m2)
        t_max = quad.truncation_sigmas * w
        pts = (w, 4.0 * w, u)
        val, err = integrate(lambda t: backend.design_integrand(t, m2, L, u),
                             0.0, t_max, quad, breakpoints=pts)
        val = _clamped_factor(val, err, f"design factor (L={L}, mu^2={m2})")
        vals.append(val)
        errs.append(err)
        log_terms.append(math.log(val) if val > 0.0 else -math.inf)
    return _product_eval(log_terms, errs, vals)


def diversity_order_estimate(curve) -> float:
    """Log-log slope of outage versus gamma_th over the final decade.

    `curve` is a sequence of (gamma_th, outage) with gamma_th strictly
    descending and outage strictly positive; the slope is fitted by least
    squares on the points whose gamma_th lies within a factor of 10 of the
    smallest one.
    """
    pts = [(float(g), float(p)) for g, p in curve]
    if len(pts) < 2:
        raise ValidationError("need at least 2 points")
    gammas = [g for g, _ in pts]
    if any(g2 >= g1 for g1, g2 in zip(gammas, gammas[1:])):
        raise ValidationError("gamma_th values must be strictly descending")
    for g, p in pts:
        if not (p > 0.0):
            raise DomainError(f"outage values must be positive, got {p} at gamma_th={g}")
    g_min = gammas[-1]
    tail = [(g, p) for g, p in pts if g <= 10.0 * g_min]
    if len(tail) < 2:
        tail = pts[-2:]
    lx = np.log([g for g, _ in tail])
    ly = np.log([p for _, p in tail])
    slope = np.polyfit(lx, ly, 1)[0]
    return float(slope)
