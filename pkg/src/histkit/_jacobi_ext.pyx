# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled cyclic Jacobi eigensolver for complex Hermitian matrices.

Same contract as :func:`histkit._jacobi_py.jacobi_eigh`.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, copysign

cnp.import_array()

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double creal(double complex)
    double complex conj(double complex)


cdef double _offdiag(double complex[:, ::1] a, Py_ssize_t n) nogil:
    cdef Py_ssize_t i, j
    cdef double total = 0.0, m
    for i in range(n):
        for j in range(n):
            if i != j:
                m = cabs(a[i, j])
                total += m * m
    return sqrt(total)


def jacobi_eigh(a, double tol=1e-15, int max_sweeps=100):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] arr = np.array(a, dtype=np.complex128, order="C")
    cdef Py_ssize_t n = arr.shape[0]
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] varr = np.eye(n, dtype=np.complex128)
    cdef double complex[:, ::1] A = arr
    cdef double complex[:, ::1] V = varr
    cdef double scale = np.linalg.norm(arr)
    cdef double thresh = tol * scale
    cdef double off, mag, app, aqq, tau, t, c, s
    cdef double complex apq, phase, u10, u11, xp, xq
    cdef Py_ssize_t p, q, k
    cdef int sweeps = 0
    with nogil:
        off = _offdiag(A, n)
        while off > thresh and sweeps < max_sweeps:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = A[p, q]
                    mag = cabs(apq)
                    if mag == 0.0:
                        continue
                    phase = apq / mag
                    app = creal(A[p, p])
                    aqq = creal(A[q, q])
                    tau = (aqq - app) / (2.0 * mag)
                    t = copysign(1.0, tau) / (fabs(tau) + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    u10 = -s * conj(phase)
                    u11 = c * conj(phase)
                    for k in range(n):
                        xp = A[k, p]
                        xq = A[k, q]
                        A[k, p] = c * xp + u10 * xq
                        A[k, q] = s * xp + u11 * xq
                    for k in range(n):
                        xp = A[p, k]
                        xq = A[q, k]
                        A[p, k] = c * xp + conj(u10) * xq
                        A[q, k] = s * xp + conj(u11) * xq
                    A[p, q] = 0.0
                    A[q, p] = 0.0
                    A[p, p] = creal(A[p, p])
                    A[q, q] = creal(A[q, q])
                    for k in range(n):
                        xp = V[k, p]
                        xq = V[k, q]
                        V[k, p] = c * xp + u10 * xq
                        V[k, q] = s * xp + u11 * xq
            sweeps += 1
            off = _offdiag(A, n)
    w = np.real(np.diag(arr)).copy()
    return w, varr, sweeps, off
