# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled time-marching loops; see _pykernels.py for the reference version."""

import numpy as np
from libc.math cimport isfinite


cdef inline double _lap(double[:, ::1] y, Py_ssize_t j, Py_ssize_t i, Py_ssize_t n) noexcept nogil:
    # y[j, n] is held at zero by the Dirichlet end
    if i == 0:
        return 2.0 * (y[j, 1] - y[j, 0])
    return y[j, i + 1] - 2.0 * y[j, i] + y[j, i - 1]


cdef inline bint _row_finite(double[:, ::1] y, Py_ssize_t j, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n + 1):
        if not isfinite(y[j, i]):
            return False
    return True


def forward_march(const double[::1] p, const double[::1] y0, Py_ssize_t M,
                  double r2, double tau2, bint hat, bint taylor, bint mirror,
                  Py_ssize_t check_every=64):
    cdef Py_ssize_t n = p.shape[0] - 1
    cdef Py_ssize_t lo = 0 if mirror else 1
    cdef Py_ssize_t i, j
    cdef Py_ssize_t bad = -1
    cdef double rhs
    out = np.zeros((M + 1, n + 1))
    cdef double[:, ::1] y = out

    with nogil:
        for i in range(lo, n):
            y[0, i] = y0[i]
        if not mirror:
            y[0, 0] = y[0, 1]

        for i in range(lo, n):
            if not taylor:
                y[1, i] = y[0, i]
            elif hat:
                y[1, i] = (y[0, i] + 0.5 * r2 * _lap(y, 0, i, n)) / (1.0 + 0.5 * tau2 * p[i])
            else:
                y[1, i] = y[0, i] + 0.5 * (r2 * _lap(y, 0, i, n) - tau2 * p[i] * y[0, i])
        if not mirror:
            y[1, 0] = y[1, 1]
        if not (_row_finite(y, 0, n) and _row_finite(y, 1, n)):
            bad = 1

        j = 1
        while bad < 0 and j < M:
            for i in range(lo, n):
                rhs = 2.0 * y[j, i] - y[j - 1, i] + r2 * _lap(y, j, i, n)
                if hat:
                    y[j + 1, i] = rhs / (1.0 + tau2 * p[i])
                else:
                    y[j + 1, i] = rhs - tau2 * p[i] * y[j, i]
            if not mirror:
                y[j + 1, 0] = y[j + 1, 1]
            j += 1
            if (j % check_every == 0 or j == M) and not _row_finite(y, j, n):
                bad = j
    return out, bad


def backward_march(const double[::1] p, const double[::1] src, Py_ssize_t nrows,
                   double r2, double tau2, bint hat, bint taylor, bint mirror,
                   bint initial_rule, Py_ssize_t check_every=64):
    cdef Py_ssize_t n = p.shape[0] - 1
    cdef Py_ssize_t lo = 0 if mirror else 1
    cdef Py_ssize_t b = lo
    cdef Py_ssize_t i, m
    cdef Py_ssize_t bad = -1
    cdef double val, lap, denom
    out = np.zeros((nrows, n + 1))
    cdef double[:, ::1] y = out

    with nogil:
        m = nrows - 3
        while bad < 0 and m >= 0:
            if m == 0 and initial_rule:
                for i in range(lo, n):
                    val = y[1, i] - y[2, i]
                    if taylor:
                        lap = r2 * _lap(y, 1, i, n)
                        if not hat:
                            lap = lap - tau2 * p[i] * y[1, i]
                        val = val + 0.5 * lap
                    y[0, i] = val
            else:
                for i in range(lo, n):
                    val = 2.0 * y[m + 1, i] - y[m + 2, i] + r2 * _lap(y, m + 1, i, n)
                    if i == b:
                        val = val + src[m]
                    if hat:
                        if m == 1 and initial_rule:
                            denom = 1.0 + 0.5 * tau2 * p[i] if taylor else 1.0
                        else:
                            denom = 1.0 + tau2 * p[i]
                        val = val / denom
                    else:
                        val = val - tau2 * p[i] * y[m + 1, i]
                    y[m, i] = val
            if not mirror:
                y[m, 0] = y[m, 1]
            if (m % check_every == 0 or m == 0) and not _row_finite(y, m, n):
                bad = m
            m -= 1
    return out, bad
