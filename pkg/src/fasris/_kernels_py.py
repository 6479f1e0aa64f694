"""Pure-Python twin of the compiled kernel extension.

Selected by `fasris.backend` when the compiled module `fasris._kernels` is
unavailable or when ``FASRIS_PURE_PYTHON=1``.  Algorithms and evaluation
order mirror the extension so the two backends agree to a few ulp.

Scalar kernels
--------------
bessel_j0       zero-order Bessel function of the first kind, evaluated by
                a midpoint rule on (1/pi) * int_0^pi cos(x sin t) dt.  The
                rule is spectrally accurate for periodic analytic
                integrands; the node count grows with |x| so the aliasing
                term stays below 1e-15 on |x| <= 500.
bessel_i0e      exp(-x) * I0(x): midpoint rule on the cosine integral for
                x <= 30, asymptotic series in 1/x above.  Never overflows.
marcum_q1_pair  (Q1(a,b), 1 - Q1(a,b)), each term computed on its stable
                side: a scaled Bessel series for a*b <= 30, an
                exponent-scaled Gauss-Legendre integral of the Rician
                density above.  All exponents are combined before
                exponentiation, so extreme arguments saturate to {0, 1}
                instead of overflowing.

Array kernels (used by the adaptive outage quadrature)
-------------------------------------------------------
rice_pdf        normalized Rician density with scale parameter m2.
bdma_integrand  Rician mixing density times the conditional no-outage
                complement raised to the block size.
design_integrand  same with the Bessel factor of the mixing density set
                to one (the phase-design approximation).
"""

import math

import numpy as np

# 64-point Gauss-Legendre rule on [-1, 1]; shared with the compiled twin.
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(64)
_GL_N = [float(v) for v in _GL_NODES]
_GL_W = [float(v) for v in _GL_WEIGHTS]

_SERIES_KMAX = 60          # Bessel-series truncation order (a*b <= 30)
_MARCUM_SWITCH = 30.0      # series/integral switchover at a*b = 30
_TAIL_LOG = 46.0           # exp(-46) ~ 1e-20 relative truncation


def _midpoint_count(x):
    # aliasing order 2n must clear the Bessel turning point x by ~12 x^(1/3)
    return 24 + int(0.5 * x + 6.0 * x ** (1.0 / 3.0))


def bessel_j0(x):
    """J0(x) by the spectrally convergent midpoint rule."""
    x = abs(x)
    n = _midpoint_count(x)
    h = math.pi / n
    s = 0.0
    for i in range(n):
        s += math.cos(x * math.sin(h * (i + 0.5)))
    return s / n


def bessel_i0e(x):
    """exp(-x) * I0(x) for x >= 0."""
    if x <= 30.0:
        n = _midpoint_count(x)
        h = math.pi / n
        s = 0.0
        for i in range(n):
            s += math.exp(-x * (1.0 - math.cos(h * (i + 0.5))))
        return s / n
    # asymptotic series: I0(x) ~ e^x / sqrt(2 pi x) * sum a_k / x^k
    s = 1.0
    term = 1.0
    for k in range(24):
        term *= (2 * k + 1) * (2 * k + 1) / (8.0 * (k + 1) * x)
        s += term
        if term < 1e-18 * s:
            break
    return s / math.sqrt(2.0 * math.pi * x)


def _ike_table(z, kmax):
    """Scaled Bessel values I_k(z) e^{-z} for k = 0..kmax.

    Direct power series for z < 1; Miller backward recursion with the
    normalization I0 + 2 sum_k I_k = e^z otherwise.
    """
    vals = [0.0] * (kmax + 1)
    if z < 1.0:
        ez = math.exp(-z)
        half = 0.5 * z
        zq = half * half
        powk = 1.0  # (z/2)^k / k!
        for k in range(kmax + 1):
            term = powk
            s = 0.0
            fac = 1.0  # (z^2/4)^j / (j! * (k+1)...(k+j))
            for j in range(12):
                s += term
                fac = zq / ((j + 1.0) * (k + j + 1.0))
                term *= fac
                if term < 1e-20 * s:
                    break
            vals[k] = s * ez
            powk *= half / (k + 1.0)
            if powk == 0.0:
                break
        return vals
    start = kmax + 16 + int(2.0 * math.sqrt(z))
    ip1 = 0.0
    i_k = 1e-300
    total = 0.0  # accumulates I0 + 2 sum_{k>=1} I_k of the unnormalized run
    for k in range(start, 0, -1):
        im1 = ip1 + (2.0 * k / z) * i_k
        total += 2.0 * i_k
        if k - 1 <= kmax:
            vals[k - 1] = im1
        ip1 = i_k
        i_k = im1
        if i_k > 1e250:
            scale = 1e-250
            ip1 *= scale
            i_k *= scale
            total *= scale
            for idx in range(kmax + 1):
                vals[idx] *= scale
    total += i_k  # i_k now holds the unnormalized I0
    inv = 1.0 / total
    for idx in range(kmax + 1):
        vals[idx] *= inv
    return vals


def _marcum_series(a, b):
    """(q, p) for a*b <= 30 via the scaled Bessel series."""
    z = a * b
    ike = _ike_table(z, _SERIES_KMAX)
    d = a - b
    pref = math.exp(-0.5 * d * d)
    if b >= a:
        r = a / b
        s = 0.0
        rk = 1.0
        for k in range(_SERIES_KMAX + 1):
            t = rk * ike[k]
            s += t
            if t < 1e-19 * s:
                break
            rk *= r
        q = pref * s
        if q > 1.0:
            q = 1.0
        return q, 1.0 - q
    r = b / a
    s = 0.0
    rk = r
    for k in range(1, _SERIES_KMAX + 1):
        t = rk * ike[k]
        s += t
        if t < 1e-19 * s and s > 0.0:
            break
        rk *= r
    p = pref * s
    if p > 1.0:
        p = 1.0
    return 1.0 - p, p


def _marcum_integral(a, b):
    """(q, p) for a*b > 30 via the exponent-scaled Rician integral.

    The smaller of the pair is integrated directly over the truncated
    head/tail with the dominant exponent pulled out of the quadrature.
    """
    if b >= a:
        d = b - a
        delta = -d + math.sqrt(d * d + 2.0 * _TAIL_LOG)
        lo, hi = b, b + delta
        mid = 0.5 * (lo + hi)
        halfw = 0.5 * (hi - lo)
        s = 0.0
        for j in range(64):
            x = mid + halfw * _GL_N[j]
            u = x - a
            s += _GL_W[j] * x * math.exp(-0.5 * (u * u - d * d)) * bessel_i0e(a * x)
        q = math.exp(-0.5 * d * d) * halfw * s
        if q > 1.0:
            q = 1.0
        elif q < 0.0:
            q = 0.0
        return q, 1.0 - q
    d = a - b
    delta = -d + math.sqrt(d * d + 2.0 * _TAIL_LOG)
    lo = b - delta
    if lo < 0.0:
        lo = 0.0
    hi = b
    mid = 0.5 * (lo + hi)
    halfw = 0.5 * (hi - lo)
    s = 0.0
    for j in range(64):
        x = mid + halfw * _GL_N[j]
        u = x - a
        s += _GL_W[j] * x * math.exp(-0.5 * (u * u - d * d)) * bessel_i0e(a * x)
    p = math.exp(-0.5 * d * d) * halfw * s
    if p > 1.0:
        p = 1.0
    elif p < 0.0:
        p = 0.0
    return 1.0 - p, p


def marcum_q1_pair(a, b):
    """(Q1(a,b), 1 - Q1(a,b)) for a, b >= 0."""
    if b == 0.0:
        return 1.0, 0.0
    if a == 0.0:
        x = -0.5 * b * b
        return math.exp(x), -math.expm1(x)
    if a * b <= _MARCUM_SWITCH:
        return _marcum_series(a, b)
    return _marcum_integral(a, b)


def i0e_array(x):
    """Vectorized exp(-x) * I0(x) for x >= 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    small = x <= 30.0
    if small.any():
        xs = x[small]
        n = _midpoint_count(30.0)
        theta = (np.arange(n) + 0.5) * (math.pi / n)
        out[small] = np.exp(-np.outer(xs, 1.0 - np.cos(theta))).sum(axis=1) / n
    big = ~small
    if big.any():
        xl = x[big]
        s = np.ones_like(xl)
        term = np.ones_like(xl)
        for k in range(24):
            term = term * ((2 * k + 1) * (2 * k + 1) / (8.0 * (k + 1))) / xl
            s += term
        out[big] = s / np.sqrt(2.0 * math.pi * xl)
    return out


def one_minus_q1_array(a, b):
    """Elementwise 1 - Q1(a_i, b) for a scalar threshold argument b."""
    a = np.asarray(a, dtype=float)
    return np.array([marcum_q1_pair(ai, b)[1] for ai in a.ravel()]).reshape(a.shape)


def rice_pdf(t, v, m2):
    """Normalized Rician density (2t/m2) e^{-(t^2+v^2)/m2} I0(2tv/m2).

    Evaluated as (2t/m2) e^{-(t-v)^2/m2} * i0e(2tv/m2) so the Bessel factor
    never overflows.
    """
    t = np.asarray(t, dtype=float)
    d = t - v
    return (2.0 * t / m2) * np.exp(-d * d / m2) * i0e_array(2.0 * t * v / m2)


def bdma_integrand(t, v, m2, L, u):
    """Per-block outage integrand of the block-diagonal model.

    rice_pdf(t; v, m2) * [1 - Q1(c t, c u)]^L with c = sqrt(2/(1-m2)).
    """
    t = np.asarray(t, dtype=float)
    c = math.sqrt(2.0 / (1.0 - m2))
    p = one_minus_q1_array(c * t, c * u)
    return rice_pdf(t, v, m2) * p ** L


def design_integrand(t, m2, L, u):
    """Per-block integrand of the phase-design approximation.

    (2t/m2) e^{-t^2/m2} * [1 - Q1(c t, c u)]^L; the Bessel factor of the
    mixing density is replaced by one and the LoS exponent is handled by
    the caller as a global prefactor.
    """
    t = np.asarray(t, dtype=float)
    c = math.sqrt(2.0 / (1.0 - m2))
    p = one_minus_q1_array(c * t, c * u)
    return (2.0 * t / m2) * np.exp(-t * t / m2) * p ** L
