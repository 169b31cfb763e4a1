# cython: language_level=3
"""Compiled kernels: candidate evaluation and brute-force partition search."""
import numpy as np

from libc.math cimport INFINITY

NAME = "cython"


def evaluate_candidates(const double[:, ::1] us, const double[:, ::1] v,
                        const double[:, :, ::1] cands, long long[:, ::1] x_out,
                        long long[:, ::1] y_out, double[::1] obj_out):
    cdef Py_ssize_t b = cands.shape[0]
    cdef Py_ssize_t r = cands.shape[1]
    cdef Py_ssize_t k = cands.shape[2]
    cdef Py_ssize_t m = us.shape[0]
    cdef Py_ssize_t n = v.shape[0]
    cdef double[:, ::1] sums = np.zeros((k, r))
    cdef Py_ssize_t c, i, j, t, col, bj
    cdef double acc, best, total

    with nogil:
        for c in range(b):
            for j in range(k):
                for t in range(r):
                    sums[j, t] = 0.0
            for i in range(m):
                best = -INFINITY
                bj = 0
                for j in range(k):
                    acc = 0.0
                    for t in range(r):
                        acc = acc + us[i, t] * cands[c, t, j]
                    if acc > best:
                        best = acc
                        bj = j
                x_out[c, i] = bj
                for t in range(r):
                    sums[bj, t] += us[i, t]
            total = 0.0
            for col in range(n):
                best = -INFINITY
                bj = 0
                for j in range(k):
                    acc = 0.0
                    for t in range(r):
                        acc = acc + sums[j, t] * v[col, t]
                    if acc > best:
                        best = acc
                        bj = j
                y_out[c, col] = bj
                total += best
            obj_out[c] = total


def exact_max_trace(const signed char[:, ::1] w, int k):
    cdef Py_ssize_t m = w.shape[0]
    cdef Py_ssize_t n = w.shape[1]
    cdef Py_ssize_t size = m + n
    cdef Py_ssize_t i, j, q
    cdef long long val, best
    cdef bint first = True
    cdef long long[::1] a = np.zeros(size, dtype=np.int64)
    cdef long long[::1] pmax = np.zeros(size, dtype=np.int64)
    best_np = np.zeros(size, dtype=np.int64)
    cdef long long[::1] best_labels = best_np
    if k > size:
        k = <int>size
    best = 0

    with nogil:
        while True:
            val = 0
            for i in range(m):
                for j in range(n):
                    if a[i] == a[m + j]:
                        val += w[i, j]
            if first or val > best:
                best = val
                first = False
                for q in range(size):
                    best_labels[q] = a[q]
            i = size - 1
            while i > 0 and (a[i] >= k - 1 or a[i] > pmax[i - 1]):
                i -= 1
            if i == 0:
                break
            a[i] += 1
            pmax[i] = pmax[i - 1] if pmax[i - 1] > a[i] else a[i]
            for q in range(i + 1, size):
                a[q] = 0
                pmax[q] = pmax[i]
    return int(best), best_np
