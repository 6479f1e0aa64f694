# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel extension; mirrors fasris._kernels_py.

Same algorithms, same constants, same evaluation order: a midpoint rule on
the Bessel cosine integrals, an asymptotic series for large scaled I0, the
scaled Bessel series / exponent-scaled Gauss-Legendre integral pair for the
Marcum Q function, and tight loops for the outage integrands.
"""

import numpy as np

from libc.math cimport cos, exp, expm1, fabs, pi, pow, sin, sqrt

cdef int _GLN = 64
cdef double[64] _GL_N
cdef double[64] _GL_W

_nodes, _weights = np.polynomial.legendre.leggauss(64)
for _i in range(64):
    _GL_N[_i] = _nodes[_i]
    _GL_W[_i] = _weights[_i]

cdef double _MARCUM_SWITCH = 30.0
cdef double _TAIL_LOG = 46.0
cdef int _SERIES_KMAX = 60


cdef inline int _midpoint_count(double x) nogil:
    return 24 + <int>(0.5 * x + 6.0 * pow(x, 1.0 / 3.0))


cdef double _j0(double x) nogil:
    cdef int n, i
    cdef double h, s
    x = fabs(x)
    n = _midpoint_count(x)
    h = pi / n
    s = 0.0
    for i in range(n):
        s += cos(x * sin(h * (i + 0.5)))
    return s / n


cdef double _i0e(double x) nogil:
    cdef int n, i, k
    cdef double h, s, term
    if x <= 30.0:
        n = _midpoint_count(x)
        h = pi / n
        s = 0.0
        for i in range(n):
            s += exp(-x * (1.0 - cos(h * (i + 0.5))))
        return s / n
    s = 1.0
    term = 1.0
    for k in range(24):
        term *= (2 * k + 1) * (2 * k + 1) / (8.0 * (k + 1) * x)
        s += term
        if term < 1e-18 * s:
            break
    return s / sqrt(2.0 * pi * x)


cdef void _ike_table(double z, double* vals) nogil:
    """Scaled Bessel I_k(z) e^{-z}, k = 0.._SERIES_KMAX, into vals."""
    cdef int k, j, start, idx
    cdef double ez, half, zq, powk, term, s, fac
    cdef double ip1, ik, im1, total, scale
    for k in range(_SERIES_KMAX + 1):
        vals[k] = 0.0
    if z < 1.0:
        ez = exp(-z)
        half = 0.5 * z
        zq = half * half
        powk = 1.0
        for k in range(_SERIES_KMAX + 1):
            term = powk
            s = 0.0
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
        return
    start = _SERIES_KMAX + 16 + <int>(2.0 * sqrt(z))
    ip1 = 0.0
    ik = 1e-300
    total = 0.0
    for k in range(start, 0, -1):
        im1 = ip1 + (2.0 * k / z) * ik
        total += 2.0 * ik
        if k - 1 <= _SERIES_KMAX:
            vals[k - 1] = im1
        ip1 = ik
        ik = im1
        if ik > 1e250:
            scale = 1e-250
            ip1 *= scale
            ik *= scale
            total *= scale
            for idx in range(_SERIES_KMAX + 1):
                vals[idx] *= scale
    total += ik
    scale = 1.0 / total
    for idx in range(_SERIES_KMAX + 1):
        vals[idx] *= scale


cdef (double, double) _marcum_series(double a, double b) nogil:
    cdef double ike[61]
    cdef double z, d, pref, r, s, rk, t, q, p
    cdef int k
    z = a * b
    _ike_table(z, ike)
    d = a - b
    pref = exp(-0.5 * d * d)
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


cdef (double, double) _marcum_integral(double a, double b) nogil:
    cdef double d, delta, lo, hi, mid, halfw, s, x, u, q, p
    cdef int j
    if b >= a:
        d = b - a
        delta = -d + sqrt(d * d + 2.0 * _TAIL_LOG)
        lo = b
        hi = b + delta
        mid = 0.5 * (lo + hi)
        halfw = 0.5 * (hi - lo)
        s = 0.0
        for j in range(_GLN):
            x = mid + halfw * _GL_N[j]
            u = x - a
            s += _GL_W[j] * x * exp(-0.5 * (u * u - d * d)) * _i0e(a * x)
        q = exp(-0.5 * d * d) * halfw * s
        if q > 1.0:
            q = 1.0
        elif q < 0.0:
            q = 0.0
        return q, 1.0 - q
    d = a - b
    delta = -d + sqrt(d * d + 2.0 * _TAIL_LOG)
    lo = b - delta
    if lo < 0.0:
        lo = 0.0
    hi = b
    mid = 0.5 * (lo + hi)
    halfw = 0.5 * (hi - lo)
    s = 0.0
    for j in range(_GLN):
        x = mid + halfw * _GL_N[j]
        u = x - a
        s += _GL_W[j] * x * exp(-0.5 * (u * u - d * d)) * _i0e(a * x)
    p = exp(-0.5 * d * d) * halfw * s
    if p > 1.0:
        p = 1.0
    elif p < 0.0:
        p = 0.0
    return 1.0 - p, p


cdef (double, double) _marcum_pair(double a, double b) nogil:
    cdef double x
    if b == 0.0:
        return 1.0, 0.0
    if a == 0.0:
        x = -0.5 * b * b
        return exp(x), -expm1(x)
    if a * b <= _MARCUM_SWITCH:
        return _marcum_series(a, b)
    return _marcum_integral(a, b)


def bessel_j0(double x):
    """J0(x) by the spectrally convergent midpoint rule."""
    return _j0(x)


def bessel_i0e(double x):
    """exp(-x) * I0(x) for x >= 0."""
    return _i0e(x)


def marcum_q1_pair(double a, double b):
    """(Q1(a,b), 1 - Q1(a,b)) for a, b >= 0."""
    cdef (double, double) qp = _marcum_pair(a, b)
    return qp[0], qp[1]


def i0e_array(x):
    """Vectorized exp(-x) * I0(x) for x >= 0."""
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=np.float64).ravel()
    out_arr = np.empty(xv.shape[0])
    cdef double[::1] ov = out_arr
    cdef Py_ssize_t i
    for i in range(xv.shape[0]):
        ov[i] = _i0e(xv[i])
    return out_arr.reshape(np.shape(x))


def one_minus_q1_array(a, double b):
    """Elementwise 1 - Q1(a_i, b) for a scalar threshold argument b."""
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64).ravel()
    out_arr = np.empty(av.shape[0])
    cdef double[::1] ov = out_arr
    cdef Py_ssize_t i
    cdef (double, double) qp
    for i in range(av.shape[0]):
        qp = _marcum_pair(av[i], b)
        ov[i] = qp[1]
    return out_arr.reshape(np.shape(a))


def rice_pdf(t, double v, double m2):
    """Normalized Rician density (2t/m2) e^{-(t-v)^2/m2} i0e(2tv/m2)."""
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out_arr = np.empty(tv.shape[0])
    cdef double[::1] ov = out_arr
    cdef Py_ssize_t i
    cdef double ti, d
    for i in range(tv.shape[0]):
        ti = tv[i]
        d = ti - v
        ov[i] = (2.0 * ti / m2) * exp(-d * d / m2) * _i0e(2.0 * ti * v / m2)
    return out_arr.reshape(np.shape(t))


def bdma_integrand(t, double v, double m2, int L, double u):
    """rice_pdf(t; v, m2) * [1 - Q1(c t, c u)]^L with c = sqrt(2/(1-m2))."""
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out_arr = np.empty(tv.shape[0])
    cdef double[::1] ov = out_arr
    cdef Py_ssize_t i
    cdef double c = sqrt(2.0 / (1.0 - m2))
    cdef double ti, d, dens
    cdef (double, double) qp
    for i in range(tv.shape[0]):
        ti = tv[i]
        d = ti - v
        dens = (2.0 * ti / m2) * exp(-d * d / m2) * _i0e(2.0 * ti * v / m2)
        qp = _marcum_pair(c * ti, c * u)
        ov[i] = dens * pow(qp[1], L)
    return out_arr.reshape(np.shape(t))


def design_integrand(t, double m2, int L, double u):
    """(2t/m2) e^{-t^2/m2} * [1 - Q1(c t, c u)]^L (no Bessel factor)."""
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out_arr = np.empty(tv.shape[0])
    cdef double[::1] ov = out_arr
    cdef Py_ssize_t i
    cdef double c = sqrt(2.0 / (1.0 - m2))
    cdef double ti
    cdef (double, double) qp
    for i in range(tv.shape[0]):
        ti = tv[i]
        qp = _marcum_pair(c * ti, c * u)
        ov[i] = (2.0 * ti / m2) * exp(-ti * ti / m2) * pow(qp[1], L)
    return out_arr.reshape(np.shape(t))
