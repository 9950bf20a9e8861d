# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled state-vector kernels; same contract as _pykernels."""

import numpy as np

cimport numpy as cnp

BACKEND = "cython"


def apply_1q(cnp.complex128_t[::1] amps, int n, int q, cnp.ndarray u):
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t stride = 1 << (n - 1 - q)
    cdef double complex u00 = u[0, 0], u01 = u[0, 1], u10 = u[1, 0], u11 = u[1, 1]
    cdef Py_ssize_t base, k, i0, i1
    cdef double complex t0, t1
    for base in range(0, size, 2 * stride):
        for k in range(stride):
            i0 = base + k
            i1 = i0 + stride
            t0 = amps[i0]
            t1 = amps[i1]
            amps[i0] = u00 * t0 + u01 * t1
            amps[i1] = u10 * t0 + u11 * t1


def apply_cz(cnp.complex128_t[::1] amps, int n, int a, int b):
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t ma = 1 << (n - 1 - a)
    cdef Py_ssize_t mb = 1 << (n - 1 - b)
    cdef Py_ssize_t i
    for i in range(size):
        if (i & ma) and (i & mb):
            amps[i] = -amps[i]


def apply_cnot(cnp.complex128_t[::1] amps, int n, int c, int t):
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t mc = 1 << (n - 1 - c)
    cdef Py_ssize_t mt = 1 << (n - 1 - t)
    cdef Py_ssize_t i, j
    cdef double complex tmp
    for i in range(size):
        if (i & mc) and not (i & mt):
            j = i | mt
            tmp = amps[i]
            amps[i] = amps[j]
            amps[j] = tmp


def prob_zero(cnp.complex128_t[::1] amps, int n, int q):
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t mq = 1 << (n - 1 - q)
    cdef double p = 0.0
    cdef Py_ssize_t i
    for i in range(size):
        if not (i & mq):
            p += amps[i].real * amps[i].real + amps[i].imag * amps[i].imag
    return p


def collapse_z(cnp.complex128_t[::1] amps, int n, int q, int outcome, double norm):
    cdef Py_ssize_t size = 1 << n
    cdef Py_ssize_t mq = 1 << (n - 1 - q)
    cdef Py_ssize_t i
    cdef int bit
    for i in range(size):
        bit = 1 if (i & mq) else 0
        if bit != outcome:
            amps[i] = 0.0
        else:
            amps[i] = amps[i] / norm
