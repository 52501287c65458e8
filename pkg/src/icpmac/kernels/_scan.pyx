# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled batch scan kernels.

Same contracts as ``_pure``; single pass per (signal, candidate) pair with no
temporaries, which is what makes the per-call latency small enough for
per-trial Monte Carlo use.
"""

from libc.math cimport sqrt, INFINITY

import numpy as np


def nearest_scan(double[:, ::1] signals, double[:, ::1] candidates, double tie_tol):
    cdef Py_ssize_t T = signals.shape[0]
    cdef Py_ssize_t n = signals.shape[1]
    cdef Py_ssize_t S = candidates.shape[0]
    if candidates.shape[1] != n:
        raise ValueError("signals and candidates disagree on sample count")
    if S == 0:
        raise ValueError("need at least one candidate")

    best_arr = np.empty(T, dtype=np.intp)
    tie_arr = np.zeros(T, dtype=np.uint8)
    res_arr = np.empty(S, dtype=np.float64)
    cdef Py_ssize_t[::1] best = best_arr
    cdef unsigned char[::1] tie = tie_arr
    cdef double[::1] res = res_arr

    cdef Py_ssize_t t, s, i, b, hits
    cdef double acc, diff, rmin, lim
    for t in range(T):
        rmin = INFINITY
        for s in range(S):
            acc = 0.0
            for i in range(n):
                diff = signals[t, i] - candidates[s, i]
                acc += diff * diff
            res[s] = sqrt(acc)
            if res[s] < rmin:
                rmin = res[s]
        lim = rmin + tie_tol
        b = -1
        hits = 0
        for s in range(S):
            if res[s] <= lim:
                hits += 1
                if b < 0:
                    b = s
        best[t] = b
        tie[t] = 1 if hits >= 2 else 0
    return best_arr, tie_arr


def proj_scan(double[:, ::1] signals, double[:, ::1] basis, Py_ssize_t[::1] offsets, double tie_tol):
    cdef Py_ssize_t T = signals.shape[0]
    cdef Py_ssize_t n = signals.shape[1]
    cdef Py_ssize_t S = offsets.shape[0] - 1
    if basis.shape[0] > 0 and basis.shape[1] != n:
        raise ValueError("signals and basis disagree on sample count")
    if S <= 0:
        raise ValueError("need at least one candidate block")
    if offsets[S] > basis.shape[0]:
        raise ValueError("offsets overrun the basis")

    best_arr = np.empty(T, dtype=np.intp)
    tie_arr = np.zeros(T, dtype=np.uint8)
    res_arr = np.empty(S, dtype=np.float64)
    cdef Py_ssize_t[::1] best = best_arr
    cdef unsigned char[::1] tie = tie_arr
    cdef double[::1] res = res_arr

    cdef Py_ssize_t t, s, r, i, b, hits
    cdef double ny2, proj, dot, r2, rmin, lim
    for t in range(T):
        ny2 = 0.0
        for i in range(n):
            ny2 += signals[t, i] * signals[t, i]
        rmin = INFINITY
        for s in range(S):
            proj = 0.0
            for r in range(offsets[s], offsets[s + 1]):
                dot = 0.0
                for i in range(n):
                    dot += basis[r, i] * signals[t, i]
                proj += dot * dot
            r2 = ny2 - proj
            if r2 < 0.0:
                r2 = 0.0
            res[s] = sqrt(r2)
            if res[s] < rmin:
                rmin = res[s]
        lim = rmin + tie_tol
        b = -1
        hits = 0
        for s in range(S):
            if res[s] <= lim:
                hits += 1
                if b < 0:
                    b = s
        best[t] = b
        tie[t] = 1 if hits >= 2 else 0
    return best_arr, tie_arr
