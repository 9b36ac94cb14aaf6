# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels; see ``_pycore`` for the contract."""
import numpy as np
from libc.math cimport exp, fabs

NAME = "cython"


def similarity_vector(const double[::1] z, const double[:, ::1] svs, double sigma):
    cdef Py_ssize_t k = svs.shape[0]
    cdef Py_ssize_t d = svs.shape[1]
    cdef Py_ssize_t i, j
    cdef double s, diff
    cdef double denom = 2.0 * sigma * sigma
    out = np.empty(k)
    cdef double[::1] o = out
    for i in range(k):
        s = 0.0
        for j in range(d):
            diff = svs[i, j] - z[j]
            s += diff * diff
        o[i] = exp(-s / denom)
    return out


def expand_inverse(const double[:, ::1] inv, const double[::1] v, double beta_min):
    cdef Py_ssize_t k = inv.shape[0]
    cdef Py_ssize_t i, j
    cdef double beta, acc
    p_arr = np.empty(k)
    cdef double[::1] p = p_arr
    acc = 0.0
    for i in range(k):
        beta = 0.0
        for j in range(k):
            beta += inv[i, j] * v[j]
        p[i] = beta
        acc += v[i] * beta
    beta = 1.0 - acc
    if not beta > beta_min:
        return None, beta
    out = np.empty((k + 1, k + 1))
    cdef double[:, ::1] o = out
    for i in range(k):
        for j in range(i, k):
            acc = inv[i, j] + p[i] * p[j] / beta
            o[i, j] = acc
            o[j, i] = acc
        acc = -p[i] / beta
        o[i, k] = acc
        o[k, i] = acc
    o[k, k] = 1.0 / beta
    return out, beta


def shrink_inverse(const double[:, ::1] inv, Py_ssize_t index, double lam_min):
    cdef Py_ssize_t k = inv.shape[0]
    cdef Py_ssize_t i, j, a, b
    cdef double lam = inv[index, index]
    cdef double acc
    if fabs(lam) < lam_min:
        return None
    out = np.empty((k - 1, k - 1))
    cdef double[:, ::1] o = out
    for i in range(k - 1):
        a = i if i < index else i + 1
        for j in range(i, k - 1):
            b = j if j < index else j + 1
            acc = inv[a, b] - inv[a, index] * inv[b, index] / lam
            o[i, j] = acc
            o[j, i] = acc
    return out


def row_sums(const double[:, ::1] inv):
    cdef Py_ssize_t k = inv.shape[0]
    cdef Py_ssize_t i, j
    cdef double s
    out = np.empty(k)
    cdef double[::1] o = out
    for i in range(k):
        s = 0.0
        for j in range(k):
            s += inv[i, j]
        o[i] = s
    return out
