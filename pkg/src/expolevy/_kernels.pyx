# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: pFq term recurrence and the Monte Carlo path loop.

Must stay in sync with _pykernels.py: same draw order, same arithmetic
ordering, so both backends are bit-identical. The RNG is consumed through
numpy's C distribution functions on a per-path Philox bit generator keyed
by (seed, path index).
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport INFINITY, ceil, exp, expm1, log, sqrt
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (random_standard_exponential,
                                           random_standard_gamma,
                                           random_standard_normal,
                                           random_standard_uniform)

from numpy.random import Philox

BACKEND = "cython"

PFQ_CONVERGED = 0
PFQ_TRUNCATED = 1
PFQ_MAX_TERMS = 2
PFQ_DIVERGES_IMMEDIATELY = 3


def pfq_sum(u, v, double complex z, double tol, long max_terms, bint asymptotic):
    """See _pykernels.pfq_sum; identical contract and arithmetic."""
    cdef double complex[::1] uu = np.ascontiguousarray(u, dtype=np.complex128)
    cdef double complex[::1] vv = np.ascontiguousarray(v, dtype=np.complex128)
    cdef Py_ssize_t p = uu.shape[0]
    cdef Py_ssize_t q = vv.shape[0]
    cdef double complex term = 1.0
    cdef double complex total = 0.0
    cdef double complex comp = 0.0
    cdef double complex y, t, num, den
    cdef double max_abs = 0.0
    cdef double a, den2, abs_err
    cdef double prev_abs = INFINITY
    cdef long n = 0
    cdef int small = 0
    cdef Py_ssize_t i
    cdef int status

    while n < max_terms:
        a = abs(term)
        if a != a or a == INFINITY:
            # overflowed term: the sum is numerically useless either way
            return complex(total), INFINITY, n, PFQ_MAX_TERMS
        if asymptotic and a >= prev_abs:
            abs_err = a + n * 1e-16 * max_abs
            status = PFQ_DIVERGES_IMMEDIATELY if n <= 1 else PFQ_TRUNCATED
            return complex(total), abs_err, n, status
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if a > max_abs:
            max_abs = a
        if not asymptotic:
            if a < tol * abs(total):
                small += 1
                if small >= 3:
                    abs_err = tol * abs(total) + n * 1e-16 * max_abs
                    return complex(total), abs_err, n + 1, PFQ_CONVERGED
            else:
                small = 0
        prev_abs = a
        num = 1.0
        for i in range(p):
            num = num * (uu[i] + n)
        den = 1.0
        for i in range(q):
            den = den * (vv[i] + n)
        den2 = den.real * den.real + den.imag * den.imag
        term = term * num * den.conjugate() / den2 * z / (n + 1.0)
        n += 1

    abs_err = abs(term) + n * 1e-16 * max_abs
    return complex(total), abs_err, n, PFQ_MAX_TERMS


cdef double _draw_jump(bitgen_t *bg, int jump_kind,
                       double[::1] cumw, double[::1] shapes,
                       double[::1] rates, double[::1] signs,
                       double[::1] txs, double[::1] tFs,
                       double left_rate, double right_rate) noexcept nogil:
    cdef double u = random_standard_uniform(bg)
    cdef double g
    cdef Py_ssize_t idx, lo, hi, mid, ntab
    if jump_kind == 1:
        idx = 0
        while idx < cumw.shape[0] - 1 and u > cumw[idx]:
            idx += 1
        g = random_standard_gamma(bg, shapes[idx])
        return signs[idx] * g / rates[idx]
    ntab = tFs.shape[0]
    if u < tFs[0]:
        return txs[0] + log(u / tFs[0]) / left_rate
    if u > tFs[ntab - 1]:
        return txs[ntab - 1] + log((1.0 - tFs[ntab - 1]) / (1.0 - u)) / right_rate
    # leftmost index with tFs[lo] >= u (matches np.searchsorted side='left')
    lo = 0
    hi = ntab
    while lo < hi:
        mid = (lo + hi) // 2
        if tFs[mid] < u:
            lo = mid + 1
        else:
            hi = mid
    if lo == 0:
        lo = 1
    return txs[lo - 1] + (u - tFs[lo - 1]) * (txs[lo] - txs[lo - 1]) / (tFs[lo] - tFs[lo - 1])


def mc_paths(object seed, long start, long n, double q, double sigma,
             double mu, double lam, double h, int jump_kind,
             double[::1] cumw, double[::1] shapes, double[::1] rates,
             double[::1] signs, double[::1] txs, double[::1] tFs,
             double left_rate, double right_rate, double qzero_rtol):
    """See _pykernels.mc_paths; identical contract, draw order, arithmetic."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, 2))
    cdef double[:, ::1] outv = out
    cdef bitgen_t *bg
    cdef long i, k, nsteps
    cdef double T, a, t, acc, next_check, acc_prev
    cdef double w, seg, inc, bound, dt, sdt, drift, ea, eb, z
    cdef bint jump
    cdef object bitgen, capsule

    for i in range(n):
        bitgen = Philox(key=[seed, start + i])
        capsule = bitgen.capsule
        bg = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")

        if q > 0:
            T = random_standard_exponential(bg) / q
        else:
            T = INFINITY
        a = 0.0
        t = 0.0
        acc = 0.0
        next_check = 1.0
        acc_prev = 0.0
        while True:
            if lam > 0:
                w = random_standard_exponential(bg) / lam
            else:
                w = INFINITY
            if sigma == 0.0:
                if q > 0:
                    jump = w < T - t
                    seg = w if jump else T - t
                else:
                    jump = w < INFINITY
                    seg = w
                if seg == INFINITY:
                    acc += exp(a) / (-mu)
                    break
                if mu == 0.0:
                    inc = exp(a) * seg
                else:
                    inc = exp(a) * expm1(mu * seg) / mu
                acc += inc
                t += seg
                a += mu * seg
                if q > 0 and not jump:
                    break
                if q == 0 and inc < qzero_rtol * acc:
                    break
                a += _draw_jump(bg, jump_kind, cumw, shapes, rates, signs,
                                txs, tFs, left_rate, right_rate)
            else:
                if q > 0:
                    bound = T
                else:
                    bound = next_check
                jump = w < bound - t
                seg = w if jump else bound - t
                if seg > 0.0:
                    nsteps = <long> ceil(seg / h)
                    if nsteps < 1:
                        nsteps = 1
                    dt = seg / nsteps
                    sdt = sigma * sqrt(dt)
                    drift = mu * dt
                    ea = exp(a)
                    for k in range(nsteps):
                        z = random_standard_normal(bg)
                        a = a + drift + sdt * z
                        eb = exp(a)
                        acc += 0.5 * dt * (ea + eb)
                        ea = eb
                t += seg
                if jump:
                    a += _draw_jump(bg, jump_kind, cumw, shapes, rates, signs,
                                    txs, tFs, left_rate, right_rate)
                elif q > 0:
                    break
                else:
                    if acc - acc_prev < qzero_rtol * acc:
                        break
                    acc_prev = acc
                    next_check += 1.0
        outv[i, 0] = acc
        outv[i, 1] = a
    return out
