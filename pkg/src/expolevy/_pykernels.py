"""Pure-Python fallback kernels.

Mirror of _kernels.pyx with identical draw order and identical arithmetic
ordering, so that both backends produce bit-identical results path by path
and term by term. Keep the two files in sync.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.random import Generator, Philox

BACKEND = "python"

# pfq_sum status codes
PFQ_CONVERGED = 0
PFQ_TRUNCATED = 1
PFQ_MAX_TERMS = 2
PFQ_DIVERGES_IMMEDIATELY = 3


def pfq_sum(u, v, z, tol, max_terms, asymptotic):
    """Sum pFq(u; v; z) by the term recurrence.

    Returns (value, abs_err, terms_used, status). Convergent mode stops
    after three consecutive terms below tol * |partial sum|; asymptotic
    mode performs optimal truncation (stop at the smallest term, error =
    first omitted term). abs_err always includes the cancellation floor
    n * eps * max|term|.
    """
    p = len(u)
    q = len(v)
    z = complex(z)
    term = 1.0 + 0.0j
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j   # Kahan compensation
    max_abs = 0.0
    n = 0
    small = 0
    prev_abs = math.inf

    while n < max_terms:
        a = abs(term)
        if a != a or a == math.inf:
            # overflowed term: the sum is numerically useless either way
            return total, math.inf, n, PFQ_MAX_TERMS
        if asymptotic and a >= prev_abs:
            abs_err = a + n * 1e-16 * max_abs
            status = PFQ_DIVERGES_IMMEDIATELY if n <= 1 else PFQ_TRUNCATED
            return total, abs_err, n, status
        # compensated add of the current term
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
                    return total, abs_err, n + 1, PFQ_CONVERGED
            else:
                small = 0
        prev_abs = a
        num = 1.0 + 0.0j
        for i in range(p):
            num = num * (u[i] + n)
        den = 1.0 + 0.0j
        for i in range(q):
            den = den * (v[i] + n)
        # conjugate division: identical rounding in both backends
        den2 = den.real * den.real + den.imag * den.imag
        term = term * num * den.conjugate() / den2 * z / (n + 1.0)
        n += 1

    abs_err = abs(term) + n * 1e-16 * max_abs
    return total, abs_err, n, PFQ_MAX_TERMS


def _draw_jump(gen, jump_kind, cumw, shapes, rates, signs,
               txs, tFs, left_rate, right_rate):
    u = gen.random()
    if jump_kind == 1:
        idx = 0
        ncomp = len(cumw)
        while idx < ncomp - 1 and u > cumw[idx]:
            idx += 1
        g = gen.standard_gamma(shapes[idx])
        return signs[idx] * g / rates[idx]
    # tabulated inverse CDF with exponential tail extensions
    if u < tFs[0]:
        return txs[0] + math.log(u / tFs[0]) / left_rate
    if u > tFs[-1]:
        return txs[-1] + math.log((1.0 - tFs[-1]) / (1.0 - u)) / right_rate
    k = int(np.searchsorted(tFs, u))
    if k == 0:
        k = 1
    return txs[k - 1] + (u - tFs[k - 1]) * (txs[k] - txs[k - 1]) / (tFs[k] - tFs[k - 1])


def mc_paths(seed, start, n, q, sigma, mu, lam, h, jump_kind,
             cumw, shapes, rates, signs, txs, tFs, left_rate, right_rate,
             qzero_rtol):
    """Simulate n paths of I_q, path i keyed by Philox(seed, start+i).

    Returns an (n, 2) array: column 0 is the integral I, column 1 the
    level X at the killing time (meaningful only for q > 0).

    sigma = 0 segments are integrated exactly; sigma > 0 segments are
    filled with Brownian increments at step h and integrated by the
    trapezoid rule. q = 0 paths (drift to -inf) stop once a segment (or,
    for sigma > 0, a unit-time block) adds less than qzero_rtol of the
    accumulated integral.
    """
    out = np.empty((n, 2))
    for i in range(n):
        gen = Generator(Philox(key=[seed, start + i]))
        if q > 0:
            T = gen.standard_exponential() / q
        else:
            T = math.inf
        a = 0.0
        t = 0.0
        acc = 0.0
        next_check = 1.0
        acc_prev = 0.0
        while True:
            if lam > 0:
                w = gen.standard_exponential() / lam
            else:
                w = math.inf
            if sigma == 0.0:
                if q > 0:
                    jump = w < T - t
                    seg = w if jump else T - t
                else:
                    jump = w < math.inf
                    seg = w
                if seg == math.inf:
                    # q = 0, no jumps, mu < 0: closed-form remainder
                    acc += math.exp(a) / (-mu)
                    break
                if mu == 0.0:
                    inc = math.exp(a) * seg
                else:
                    inc = math.exp(a) * math.expm1(mu * seg) / mu
                acc += inc
                t += seg
                a += mu * seg
                if q > 0 and not jump:
                    break
                if q == 0 and inc < qzero_rtol * acc:
                    break
                a += _draw_jump(gen, jump_kind, cumw, shapes, rates, signs,
                                txs, tFs, left_rate, right_rate)
            else:
                if q > 0:
                    bound = T
                else:
                    bound = next_check
                jump = w < bound - t
                seg = w if jump else bound - t
                if seg > 0.0:
                    nsteps = int(math.ceil(seg / h))
                    if nsteps < 1:
                        nsteps = 1
                    dt = seg / nsteps
                    sdt = sigma * math.sqrt(dt)
                    drift = mu * dt
                    zs = gen.standard_normal(nsteps)
                    ea = math.exp(a)
                    for k in range(nsteps):
                        a = a + drift + sdt * zs[k]
                        eb = math.exp(a)
                        acc += 0.5 * dt * (ea + eb)
                        ea = eb
                t += seg
                if jump:
                    a += _draw_jump(gen, jump_kind, cumw, shapes, rates, signs,
                                    txs, tFs, left_rate, right_rate)
                elif q > 0:
                    break
                else:
                    if acc - acc_prev < qzero_rtol * acc:
                        break
                    acc_prev = acc
                    next_check += 1.0
        out[i, 0] = acc
        out[i, 1] = a
    return out
