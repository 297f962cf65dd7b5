# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics mirror ``_pure`` exactly."""

import numpy as np

cimport numpy as cnp


def lcs_length(a, b):
    """Length of the longest common subsequence of two int sequences."""
    return _lcs(np.ascontiguousarray(a, dtype=np.int64),
                np.ascontiguousarray(b, dtype=np.int64))


def edit_distance(a, b):
    """Levenshtein distance between two int sequences (unit costs)."""
    return _edit(np.ascontiguousarray(a, dtype=np.int64),
                 np.ascontiguousarray(b, dtype=np.int64))


def power_iteration(weights, double damping, double epsilon, int max_iterations):
    """Damped power iteration over a weighted graph; see ``_pure``."""
    return _power(np.ascontiguousarray(weights, dtype=np.float64),
                  damping, epsilon, max_iterations)


cdef int _lcs(cnp.int64_t[::1] a, cnp.int64_t[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0 or m == 0:
        return 0
    cdef cnp.int64_t[::1] prev = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] curr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] tmp
    cdef Py_ssize_t i, j
    cdef cnp.int64_t ai, pj, cj
    for i in range(1, n + 1):
        ai = a[i - 1]
        for j in range(1, m + 1):
            if ai == b[j - 1]:
                curr[j] = prev[j - 1] + 1
            else:
                pj = prev[j]
                cj = curr[j - 1]
                curr[j] = pj if pj >= cj else cj
        tmp = prev
        prev = curr
        curr = tmp
    return prev[m]


cdef int _edit(cnp.int64_t[::1] a, cnp.int64_t[::1] b):
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0:
        return m
    if m == 0:
        return n
    cdef cnp.int64_t[::1] prev = np.arange(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] curr = np.zeros(m + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] tmp
    cdef Py_ssize_t i, j
    cdef cnp.int64_t ai, cost, best, cand
    for i in range(1, n + 1):
        curr[0] = i
        ai = a[i - 1]
        for j in range(1, m + 1):
            cost = 0 if ai == b[j - 1] else 1
            best = prev[j - 1] + cost
            cand = prev[j] + 1
            if cand < best:
                best = cand
            cand = curr[j - 1] + 1
            if cand < best:
                best = cand
            curr[j] = best
        tmp = prev
        prev = curr
        curr = tmp
    return prev[m]


cdef _power(double[:, ::1] weights, double damping, double epsilon, int max_iterations):
    cdef Py_ssize_t n = weights.shape[0]
    cdef cnp.float64_t[::1] out_sum = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[::1] scores = np.ones(n, dtype=np.float64)
    cdef cnp.float64_t[::1] incoming = np.zeros(n, dtype=np.float64)
    cdef double base = 1.0 - damping
    cdef Py_ssize_t i, j
    cdef int iterations = 0, it
    cdef double contrib, wji, delta, new, d
    for j in range(n):
        out_sum[j] = 0.0
        for i in range(n):
            out_sum[j] += weights[j, i]
    for it in range(max_iterations):
        for i in range(n):
            incoming[i] = 0.0
        for j in range(n):
            if out_sum[j] <= 0.0:
                continue
            contrib = damping * scores[j] / out_sum[j]
            for i in range(n):
                wji = weights[j, i]
                if wji != 0.0:
                    incoming[i] += contrib * wji
        delta = 0.0
        for i in range(n):
            new = base + incoming[i]
            d = new - scores[i]
            if d < 0.0:
                d = -d
            if d > delta:
                delta = d
            scores[i] = new
        iterations += 1
        if delta < epsilon:
            break
    return [scores[i] for i in range(n)], iterations
