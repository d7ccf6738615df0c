# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled brute-force distance scans. Semantics match ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()


cdef inline double _dist(const double[:, ::1] P, Py_ssize_t i,
                         const double[:, ::1] Q, Py_ssize_t j, Py_ssize_t n) noexcept nogil:
    cdef double s = 0.0, d
    cdef Py_ssize_t k
    for k in range(n):
        d = P[i, k] - Q[j, k]
        s += d * d
    return sqrt(s)


def min_dists(P, Q):
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef Py_ssize_t np_ = p.shape[0], nq = q.shape[0], n = p.shape[1]
    out = np.empty(np_, dtype=np.float64)
    cdef double[::1] o = out
    cdef Py_ssize_t i, j
    cdef double best, d
    with nogil:
        for i in range(np_):
            best = INFINITY
            for j in range(nq):
                d = _dist(p, i, q, j, n)
                if d < best:
                    best = d
            o[i] = best
    return out


def directed_hausdorff(P, Q):
    """max over p of min over q, with the usual early exit once a row cannot raise the max."""
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef Py_ssize_t np_ = p.shape[0], nq = q.shape[0], n = p.shape[1]
    cdef Py_ssize_t i, j
    cdef double cmax = 0.0, best, d
    with nogil:
        for i in range(np_):
            best = INFINITY
            for j in range(nq):
                d = _dist(p, i, q, j, n)
                if d < best:
                    best = d
                    if best < cmax:
                        break
            if best > cmax:
                cmax = best
    return cmax


def nearest_stats(P, Q, double tol):
    """Per row of P: the two smallest distances to Q, plus the count of Q
    within nearest + tol."""
    cdef const double[:, ::1] p = np.ascontiguousarray(P, dtype=np.float64)
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef Py_ssize_t np_ = p.shape[0], nq = q.shape[0], n = p.shape[1]
    d1 = np.empty(np_, dtype=np.float64)
    d2 = np.empty(np_, dtype=np.float64)
    cnt = np.empty(np_, dtype=np.int64)
    cdef double[::1] o1 = d1, o2 = d2
    cdef long long[::1] oc = cnt
    cdef Py_ssize_t i, j
    cdef double a, b, d, lim
    cdef long long c
    with nogil:
        for i in range(np_):
            a = INFINITY
            b = INFINITY
            for j in range(nq):
                d = _dist(p, i, q, j, n)
                if d < a:
                    b = a
                    a = d
                elif d < b:
                    b = d
            lim = a + tol
            c = 0
            for j in range(nq):
                if _dist(p, i, q, j, n) <= lim:
                    c += 1
            o1[i] = a
            o2[i] = b
            oc[i] = c
    return d1, d2, cnt
