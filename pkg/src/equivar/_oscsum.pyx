# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernel for the oscillatory tensor-grid reduction.

Computes  sum_{p, s} wp[p] * ws[s] * exp(i * inv_mu * dot(A[p], S[s]))
for phase-coefficient rows A (one per fiber node) and Lie-coordinate
nodes S.  A NumPy fallback with identical semantics lives in
``equivar.oscsum``.
"""

from libc.math cimport cos, sin


def osc_bilinear(double[:, ::1] A, double[:, ::1] S,
                 double[::1] wp, double[::1] ws, double inv_mu):
    cdef Py_ssize_t P = A.shape[0]
    cdef Py_ssize_t Sn = S.shape[0]
    cdef Py_ssize_t d = A.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double re = 0.0, im = 0.0
    cdef double row_re, row_im, ph, w
    for i in range(P):
        w = wp[i]
        if w == 0.0:
            continue
        row_re = 0.0
        row_im = 0.0
        for j in range(Sn):
            if ws[j] == 0.0:
                continue
            ph = 0.0
            for k in range(d):
                ph += A[i, k] * S[j, k]
            ph *= inv_mu
            row_re += ws[j] * cos(ph)
            row_im += ws[j] * sin(ph)
        re += w * row_re
        im += w * row_im
    return complex(re, im)
