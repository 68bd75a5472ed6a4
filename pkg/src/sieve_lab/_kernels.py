"""Compiled inner integrals over the (t, s) triangle.

After the symmetric reduction every functional becomes an outer integral over
shift variables of an inner integral over ``0 < s < t < 1`` (extended support,
clip bound ``U = 1 + s/(k-1)``) or over ``0 < t < 1`` with density
``t**(k-2)/(k-2)!`` (simplex support, ``U = 1``).  The inner integrands are
piecewise polynomials; we split at every breakpoint and use Gauss-Legendre
rules with enough nodes to be exact on each piece.

All results are normalized by ``(k-3)!`` (extended) or ``(k-2)!`` (simplex).
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


def gl_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return x.astype(np.float64), w.astype(np.float64)


def exact_nodes(poly_degree: int) -> int:
    """Gauss-Legendre order exact for polynomials of the given degree."""
    return max(1, poly_degree // 2 + 1)


@njit(cache=True)
def _horner(c, x):
    acc = 0.0
    for i in range(c.shape[0] - 1, -1, -1):
        acc = acc * x + c[i]
    return acc


@njit(cache=True)
def _sorted_breaks(vals, nvals, lo, hi):
    out = np.empty(nvals + 2)
    out[0] = lo
    m = 1
    for i in range(nvals):
        v = vals[i]
        if v > lo and v < hi:
            out[m] = v
            m += 1
    out[m] = hi
    m += 1
    res = np.sort(out[:m])
    return res


@njit(cache=True)
def _shift_h(A, offs, signs, t, U):
    AU = _horner(A, U)
    h = 0.0
    for j in range(offs.shape[0]):
        x = t + offs[j]
        if x < U:
            h += signs[j] * (AU - _horner(A, x))
    return h


@njit(cache=True)
def shift_sq_extended(A, offs, signs, k, xt, wt, xs, ws):
    """``(1/(k-3)!) int int h(t,s)^2 (t-s)^(k-3) ds dt`` on the extended support."""
    m = offs.shape[0]
    kk = k - 1.0
    tv = np.empty(2 * m)
    for j in range(m):
        tv[2 * j] = 1.0 - offs[j]
        tv[2 * j + 1] = kk * (1.0 - offs[j]) / (k - 2.0)
    tb = _sorted_breaks(tv, 2 * m, 0.0, 1.0)
    sv = np.empty(m)
    total = 0.0
    for it in range(tb.shape[0] - 1):
        ta, tz = tb[it], tb[it + 1]
        if tz - ta <= 0.0:
            continue
        hm, hl = 0.5 * (ta + tz), 0.5 * (tz - ta)
        for p in range(xt.shape[0]):
            t = hm + hl * xt[p]
            for j in range(m):
                sv[j] = kk * (t + offs[j] - 1.0)
            sb = _sorted_breaks(sv, m, 0.0, t)
            inner = 0.0
            for iq in range(sb.shape[0] - 1):
                sa, sz = sb[iq], sb[iq + 1]
                if sz - sa <= 0.0:
                    continue
                sm, sl = 0.5 * (sa + sz), 0.5 * (sz - sa)
                acc = 0.0
                for q in range(xs.shape[0]):
                    s = sm + sl * xs[q]
                    h = _shift_h(A, offs, signs, t, 1.0 + s / kk)
                    acc += ws[q] * h * h * (t - s) ** (k - 3)
                inner += sl * acc
            total += hl * wt[p] * inner
    return total / math.gamma(k - 2.0)


@njit(cache=True)
def shift_sq_simplex(A, offs, signs, k, xt, wt):
    """``(1/(k-2)!) int_0^1 h(t)^2 t^(k-2) dt`` with clip bound 1."""
    m = offs.shape[0]
    tv = np.empty(m)
    for j in range(m):
        tv[j] = 1.0 - offs[j]
    tb = _sorted_breaks(tv, m, 0.0, 1.0)
    total = 0.0
    for it in range(tb.shape[0] - 1):
        ta, tz = tb[it], tb[it + 1]
        if tz - ta <= 0.0:
            continue
        hm, hl = 0.5 * (ta + tz), 0.5 * (tz - ta)
        acc = 0.0
        for p in range(xt.shape[0]):
            t = hm + hl * xt[p]
            h = _shift_h(A, offs, signs, t, 1.0)
            acc += wt[p] * h * h * t ** (k - 2)
        total += hl * acc
    return total / math.gamma(k - 1.0)


@njit(cache=True)
def shift_sq_batch(A, offs, signs, k, extended, xt, wt, xs, ws):
    n = offs.shape[0]
    out = np.empty(n)
    for i in range(n):
        if extended:
            out[i] = shift_sq_extended(A, offs[i], signs, k, xt, wt, xs, ws)
        else:
            out[i] = shift_sq_simplex(A, offs[i], signs, k, xt, wt)
    return out


@njit(cache=True)
def _binom(n, r):
    acc = 1.0
    for i in range(r):
        acc = acc * (n - i) / (i + 1)
    return acc


@njit(cache=True)
def _diff_sq_antider(f, y):
    """Antiderivative (zero at 0) of ``(f(x) - f(x+y))**2`` as coefficients."""
    d = f.shape[0]
    g = np.zeros(d)
    for n in range(d):
        # f(x+y) contribution of c_n (x+y)^n
        for i in range(n + 1):
            g[i] -= f[n] * _binom(n, i) * y ** (n - i)
        g[n] += f[n]
    sq = np.zeros(2 * d - 1)
    for i in range(d):
        for j in range(d):
            sq[i + j] += g[i] * g[j]
    out = np.zeros(2 * d)
    for i in range(2 * d - 1):
        out[i + 1] = sq[i] / (i + 1)
    return out


@njit(cache=True)
def j0_extended(f, A2, y, k, xt, wt, xs, ws):
    """Inner pieces of the small-prime functional on the extended support.

    Returns ``(i1, i2)``: the retained-shift part and the shell part, each
    normalized by ``(k-3)!``.
    """
    AD = _diff_sq_antider(f, y)
    kk = k - 1.0
    tv = np.empty(2)
    tv[0] = 1.0 - y
    tv[1] = kk * (1.0 - y) / (k - 2.0)
    tb = _sorted_breaks(tv, 2, 0.0, 1.0)
    sv = np.empty(1)
    i1 = 0.0
    i2 = 0.0
    for it in range(tb.shape[0] - 1):
        ta, tz = tb[it], tb[it + 1]
        if tz - ta <= 0.0:
            continue
        hm, hl = 0.5 * (ta + tz), 0.5 * (tz - ta)
        for p in range(xt.shape[0]):
            t = hm + hl * xt[p]
            sv[0] = kk * (t + y - 1.0)
            sb = _sorted_breaks(sv, 1, 0.0, t)
            a1 = 0.0
            a2 = 0.0
            for iq in range(sb.shape[0] - 1):
                sa, sz = sb[iq], sb[iq + 1]
                if sz - sa <= 0.0:
                    continue
                sm, sl = 0.5 * (sa + sz), 0.5 * (sz - sa)
                b1 = 0.0
                b2 = 0.0
                for q in range(xs.shape[0]):
                    s = sm + sl * xs[q]
                    U = 1.0 + s / kk
                    mm = max(t, U - y)
                    wgt = ws[q] * (t - s) ** (k - 3)
                    b1 += wgt * (_horner(AD, mm) - _horner(AD, t))
                    b2 += wgt * (_horner(A2, U) - _horner(A2, mm))
                a1 += sl * b1
                a2 += sl * b2
            i1 += hl * wt[p] * a1
            i2 += hl * wt[p] * a2
    fac = math.gamma(k - 2.0)
    return i1 / fac, i2 / fac


@njit(cache=True)
def j0_simplex(f, A2, y, k, xt, wt):
    AD = _diff_sq_antider(f, y)
    tv = np.empty(1)
    tv[0] = 1.0 - y
    tb = _sorted_breaks(tv, 1, 0.0, 1.0)
    i1 = 0.0
    i2 = 0.0
    for it in range(tb.shape[0] - 1):
        ta, tz = tb[it], tb[it + 1]
        if tz - ta <= 0.0:
            continue
        hm, hl = 0.5 * (ta + tz), 0.5 * (tz - ta)
        a1 = 0.0
        a2 = 0.0
        for p in range(xt.shape[0]):
            t = hm + hl * xt[p]
            mm = max(t, 1.0 - y)
            wgt = wt[p] * t ** (k - 2)
            a1 += wgt * (_horner(AD, mm) - _horner(AD, t))
            a2 += wgt * (_horner(A2, 1.0) - _horner(A2, mm))
        i1 += hl * a1
        i2 += hl * a2
    fac = math.gamma(k - 1.0)
    return i1 / fac, i2 / fac


@njit(cache=True)
def j0_batch(f, A2, ys, k, extended, xt, wt, xs, ws):
    n = ys.shape[0]
    o1 = np.empty(n)
    o2 = np.empty(n)
    for i in range(n):
        if extended:
            a, b = j0_extended(f, A2, ys[i], k, xt, wt, xs, ws)
        else:
            a, b = j0_simplex(f, A2, ys[i], k, xt, wt)
        o1[i] = a
        o2[i] = b
    return o1, o2


@njit(cache=True)
def band_sq_extended(A, offs, signs, k, clo, chi, xt, wt, xs, ws):
    """As ``shift_sq_extended`` but only where ``t + clo < U < t + chi``."""
    m = offs.shape[0]
    kk = k - 1.0
    tv = np.empty(2 * m + 4)
    for j in range(m):
        tv[2 * j] = 1.0 - offs[j]
        tv[2 * j + 1] = kk * (1.0 - offs[j]) / (k - 2.0)
    tv[2 * m] = 1.0 - clo
    tv[2 * m + 1] = kk * (1.0 - clo) / (k - 2.0)
    tv[2 * m + 2] = 1.0 - chi
    tv[2 * m + 3] = kk * (1.0 - chi) / (k - 2.0)
    tb = _sorted_breaks(tv, 2 * m + 4, 0.0, 1.0)
    sv = np.empty(m)
    total = 0.0
    for it in range(tb.shape[0] - 1):
        ta, tz = tb[it], tb[it + 1]
        if tz - ta <= 0.0:
            continue
        hm, hl = 0.5 * (ta + tz), 0.5 * (tz - ta)
        for p in range(xt.shape[0]):
            t = hm + hl * xt[p]
            slo = max(0.0, kk * (t + clo - 1.0))
            shi = min(t, kk * (t + chi - 1.0))
            if shi <= slo:
                continue
            for j in range(m):
                sv[j] = kk * (t + offs[j] - 1.0)
            sb = _sorted_breaks(sv, m, slo, shi)
            inner = 0.0
            for iq in range(sb.shape[0] - 1):
                sa, sz = sb[iq], sb[iq + 1]
                if sz - sa <= 0.0:
                    continue
                sm, sl = 0.5 * (sa + sz), 0.5 * (sz - sa)
                acc = 0.0
                for q in range(xs.shape[0]):
                    s = sm + sl * xs[q]
                    h = _shift_h(A, offs, signs, t, 1.0 + s / kk)
                    acc += ws[q] * h * h * (t - s) ** (k - 3)
                inner += sl * acc
            total += hl * wt[p] * inner
    return total / math.gamma(k - 2.0)


@njit(cache=True)
def band_sq_simplex(A, offs, signs, k, clo, chi, xt, wt):
    """As ``shift_sq_simplex`` but only where ``t + clo < 1 < t + chi``."""
    m = offs.shape[0]
    tv = np.empty(m)
    for j in range(m):
        tv[j] = 1.0 - offs[j]
    lo = max(0.0, 1.0 - chi)
    hi = min(1.0, 1.0 - clo)
    if hi <= lo:
        return 0.0
    tb = _sorted_breaks(tv, m, lo, hi)
    total = 0.0
    for it in range(tb.shape[0] - 1):
        ta, tz = tb[it], tb[it + 1]
        if tz - ta <= 0.0:
            continue
        hm, hl = 0.5 * (ta + tz), 0.5 * (tz - ta)
        acc = 0.0
        for p in range(xt.shape[0]):
            t = hm + hl * xt[p]
            h = _shift_h(A, offs, signs, t, 1.0)
            acc += wt[p] * h * h * t ** (k - 2)
        total += hl * acc
    return total / math.gamma(k - 1.0)


@njit(cache=True)
def band_sq_batch(A, offs, signs, k, extended, clo, chi, xt, wt, xs, ws):
    """``clo``/``chi`` are per-point band offsets; ``chi = inf`` means no upper edge."""
    n = offs.shape[0]
    out = np.empty(n)
    for i in range(n):
        if extended:
            out[i] = band_sq_extended(A, offs[i], signs, k, clo[i], chi[i], xt, wt, xs, ws)
        else:
            out[i] = band_sq_simplex(A, offs[i], signs, k, clo[i], chi[i], xt, wt)
    return out
