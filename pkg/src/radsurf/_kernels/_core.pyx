# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Monte Carlo counting kernels.

Scalar loops with early exit: a sample is abandoned at the first violated
constraint, which beats the vectorized fallback whenever rejection happens
early.  Counts match radsurf._kernels._fallback exactly (up to samples
within one ulp of a constraint boundary, a probability-zero event for
continuous samplers).
"""

from libc.math cimport INFINITY


def facet_accept_count(double[:, ::1] dirs, double[::1] scales,
                       double[:, ::1] normals, double[::1] base,
                       double[::1] offsets):
    """Count samples k with base[j] + scales[k]*<dirs[k], normals[j]> <= offsets[j]
    for every constraint j."""
    cdef Py_ssize_t S = dirs.shape[0]
    cdef Py_ssize_t D = dirs.shape[1]
    cdef Py_ssize_t K = normals.shape[0]
    cdef Py_ssize_t k, j, i
    cdef double dot, s
    cdef bint ok
    cdef long count = 0
    for k in range(S):
        s = scales[k]
        ok = True
        for j in range(K):
            dot = 0.0
            for i in range(D):
                dot += dirs[k, i] * normals[j, i]
            if base[j] + s * dot > offsets[j]:
                ok = False
                break
        if ok:
            count += 1
    return count


def polytope_shell_counts(double[:, ::1] pts, double[:, ::1] normals,
                          double[::1] offsets, double eps):
    """Return (inside, shell) counts for the polytope membership test;
    shell means maximal violation in (0, eps]."""
    cdef Py_ssize_t S = pts.shape[0]
    cdef Py_ssize_t D = pts.shape[1]
    cdef Py_ssize_t K = normals.shape[0]
    cdef Py_ssize_t k, j, i
    cdef double v, dot
    cdef long inside = 0
    cdef long shell = 0
    for k in range(S):
        v = -INFINITY
        for j in range(K):
            dot = 0.0
            for i in range(D):
                dot += pts[k, i] * normals[j, i]
            dot -= offsets[j]
            if dot > v:
                v = dot
                if v > eps:
                    break
        if v <= 0.0:
            inside += 1
        elif v <= eps:
            shell += 1
    return inside, shell
