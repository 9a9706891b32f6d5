# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics documented in _ref.py.

Sums run sequentially in term/sample order, so repeated calls are
bit-identical.
"""

import numpy as np

from libc.math cimport log1p

LINK_LOG1P = 0
LINK_QGAIN = 1


def poly_value(double[::1] coeffs, long[::1] flat, long[::1] offsets,
               double[::1] y, bint complement):
    cdef Py_ssize_t t, e, T = coeffs.shape[0]
    cdef double total = 0.0, prod, f
    for t in range(T):
        prod = coeffs[t]
        for e in range(offsets[t], offsets[t + 1]):
            f = y[flat[e]]
            if complement:
                f = 1.0 - f
            prod *= f
            if prod == 0.0:
                break
        total += prod
    return total


def poly_grad(double[::1] coeffs, long[::1] flat, long[::1] offsets,
              double[::1] y, Py_ssize_t n, bint complement):
    cdef Py_ssize_t t, e, m, T = coeffs.shape[0]
    cdef double run, f, sign = -1.0 if complement else 1.0
    out_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t maxlen = 0
    for t in range(T):
        m = offsets[t + 1] - offsets[t]
        if m > maxlen:
            maxlen = m
    buf_arr = np.empty(max(maxlen, 1), dtype=np.float64)
    cdef double[::1] buf = buf_arr
    for t in range(T):
        # prefix products of factors strictly before each position
        run = 1.0
        for e in range(offsets[t], offsets[t + 1]):
            buf[e - offsets[t]] = run
            f = y[flat[e]]
            if complement:
                f = 1.0 - f
            run *= f
        # sweep back accumulating suffix products
        run = 1.0
        for e in range(offsets[t + 1] - 1, offsets[t] - 1, -1):
            out[flat[e]] += sign * coeffs[t] * buf[e - offsets[t]] * run
            f = y[flat[e]]
            if complement:
                f = 1.0 - f
            run *= f
    return out_arr


def component_values(double[::1] coeffs, long[::1] flat, long[::1] offsets,
                     long[::1] term_comp, double[::1] comp_const,
                     unsigned char[::1] x):
    cdef Py_ssize_t t, e, T = coeffs.shape[0], C = comp_const.shape[0]
    cdef bint alive
    g_arr = np.array(comp_const, dtype=np.float64, copy=True)
    cdef double[::1] g = g_arr
    for t in range(T):
        alive = True
        for e in range(offsets[t], offsets[t + 1]):
            if x[flat[e]]:
                alive = False
                break
        if alive:
            g[term_comp[t]] += coeffs[t]
    return g_arr


def samp_mean_diffs(double[::1] coeffs, long[::1] flat, long[::1] offsets,
                    long[::1] term_comp, double[::1] comp_const,
                    long[::1] comp_of_var, int link_code,
                    unsigned char[:, ::1] X):
    cdef Py_ssize_t l, t, e, i, c, cnt, lastsel
    cdef Py_ssize_t N = X.shape[0], n = X.shape[1]
    cdef Py_ssize_t T = coeffs.shape[0], C = comp_const.shape[0]
    cdef double gb, gp, gm, d

    acc_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] acc = acc_arr
    if T == 0 or N == 0:
        return acc_arr

    gsum_arr = np.zeros(C, dtype=np.float64)
    u_arr = np.zeros(n, dtype=np.float64)
    w_arr = np.zeros(n, dtype=np.float64)
    cdef double[::1] gsum = gsum_arr
    cdef double[::1] u = u_arr
    cdef double[::1] w = w_arr

    for l in range(N):
        for c in range(C):
            gsum[c] = 0.0
        for i in range(n):
            u[i] = 0.0
            w[i] = 0.0
        for t in range(T):
            cnt = 0
            lastsel = -1
            for e in range(offsets[t], offsets[t + 1]):
                i = flat[e]
                if X[l, i]:
                    cnt += 1
                    lastsel = i
                    if cnt > 1:
                        break
            if cnt == 0:
                gsum[term_comp[t]] += coeffs[t]
                for e in range(offsets[t], offsets[t + 1]):
                    u[flat[e]] += coeffs[t]
            elif cnt == 1:
                w[lastsel] += coeffs[t]
        for i in range(n):
            c = comp_of_var[i]
            if c < 0:
                continue
            gb = comp_const[c] + gsum[c]
            gp = gb - u[i]
            gm = gb + w[i]
            if link_code == 0:
                d = log1p(gp) - log1p(gm)
            else:
                d = gm / (1.0 - gm) - gp / (1.0 - gp)
            acc[i] += d
    for i in range(n):
        acc[i] /= N
    return acc_arr
