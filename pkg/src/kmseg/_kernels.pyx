# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-pixel kernels; same contract as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs

cnp.import_array()


def count_levels(values, Py_ssize_t m):
    cdef const cnp.int64_t[::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef cnp.int64_t[::1] out
    cdef Py_ssize_t i, n = v.shape[0]
    cdef cnp.int64_t x
    res = np.zeros(m + 1, dtype=np.int64)
    out = res
    with nogil:
        for i in range(n):
            x = v[i]
            if x < 0 or x > m:
                with gil:
                    raise ValueError("level out of range [0, m]")
            out[x] += 1
    return res


def nearest_labels(values, centroids):
    cdef const cnp.int64_t[::1] v = np.ascontiguousarray(values, dtype=np.int64)
    cdef const double[::1] c = np.ascontiguousarray(centroids, dtype=np.float64)
    cdef Py_ssize_t i, j, n = v.shape[0], k = c.shape[0]
    cdef double x, d, best
    cdef int arg
    res = np.empty(n, dtype=np.int32)
    cdef int[::1] out = res
    with nogil:
        for i in range(n):
            x = <double>v[i]
            best = fabs(x - c[0])
            arg = 0
            for j in range(1, k):
                d = fabs(x - c[j])
                # strict: equal distance keeps the lower index
                if d < best:
                    best = d
                    arg = j
            out[i] = arg
    return res


def cluster_moments(counts, cluster_of, Py_ssize_t k):
    cdef const cnp.int64_t[::1] h = np.ascontiguousarray(counts, dtype=np.int64)
    cdef const cnp.int64_t[::1] g = np.ascontiguousarray(cluster_of, dtype=np.int64)
    cdef Py_ssize_t a, n = h.shape[0]
    cdef cnp.int64_t j
    r0 = np.zeros(k, dtype=np.int64)
    r1 = np.zeros(k, dtype=np.int64)
    r2 = np.zeros(k, dtype=np.int64)
    cdef cnp.int64_t[::1] s0 = r0, s1 = r1, s2 = r2
    with nogil:
        for a in range(n):
            j = g[a]
            if j < 0 or h[a] == 0:
                continue
            s0[j] += h[a]
            s1[j] += a * h[a]
            s2[j] += a * a * h[a]
    return r0, r1, r2
