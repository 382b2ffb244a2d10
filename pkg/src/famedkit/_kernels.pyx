# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_kernels_py``, parallel over OpenMP threads."""
import numpy as np
from cython.parallel cimport prange
from libc.stdlib cimport free, malloc

cdef extern from "complex.h" nogil:
    double complex cexp(double complex)
    double creal(double complex)
    double cimag(double complex)

cdef extern from "math.h" nogil:
    double sin(double)
    double cos(double)
    double exp(double)

cdef int _threads = 1


def set_threads(int n):
    global _threads
    _threads = max(1, n)


def get_threads():
    return _threads


def sin_sum(z, nodes, weights):
    """``out[m] = sum_j weights[j] * sin(2 z[m] nodes[j])``."""
    cdef double complex[::1] zv = np.ascontiguousarray(z, dtype=np.complex128).ravel()
    cdef double[::1] t = np.ascontiguousarray(nodes, dtype=np.float64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    out = np.empty(zv.shape[0], dtype=np.complex128)
    cdef double[:, ::1] ov = out.view(np.float64).reshape(-1, 2)
    cdef Py_ssize_t m, j, nz = zv.shape[0], nt = t.shape[0]
    cdef double re, im, x, e, ch, sh, accr, acci
    for m in prange(nz, nogil=True, num_threads=_threads, schedule="static"):
        re = 2 * creal(zv[m])
        im = 2 * cimag(zv[m])
        accr = 0
        acci = 0
        for j in range(nt):
            x = re * t[j]
            e = exp(im * t[j])
            ch = 0.5 * (e + 1 / e)
            sh = 0.5 * (e - 1 / e)
            accr = accr + w[j] * sin(x) * ch
            acci = acci + w[j] * cos(x) * sh
        ov[m, 0] = accr
        ov[m, 1] = acci
    return out


def coupled_sum2(f1, y1, f2, y2, double complex c):
    """``sum_{j,k} f1[j] f2[k] exp(c y1[j] y2[k])``."""
    cdef double complex[::1] a = np.ascontiguousarray(f1, dtype=np.complex128)
    cdef double complex[::1] u = np.ascontiguousarray(y1, dtype=np.complex128)
    cdef double complex[::1] g = np.ascontiguousarray(f2, dtype=np.complex128)
    cdef double complex[::1] v = np.ascontiguousarray(y2, dtype=np.complex128)
    cdef Py_ssize_t j, k, n1 = a.shape[0], n2 = g.shape[0]
    if c == 0:
        return complex(np.sum(a) * np.sum(g))
    part = np.zeros(n1, dtype=np.complex128)
    cdef double complex[::1] pv = part
    cdef double complex inner, cu
    for j in prange(n1, nogil=True, num_threads=_threads, schedule="static"):
        inner = 0
        cu = c * u[j]
        for k in range(n2):
            inner = inner + g[k] * cexp(cu * v[k])
        pv[j] = a[j] * inner
    return complex(np.sum(part))


def coupled_sum3(f1, y1, f2, y2, f3, y3, double complex c12, double complex c13, double complex c23):
    """``sum f1 f2 f3 exp(c12 y1 y2 + c13 y1 y3 + c23 y2 y3)`` over the grid."""
    cdef double complex[::1] a = np.ascontiguousarray(f1, dtype=np.complex128)
    cdef double complex[::1] u = np.ascontiguousarray(y1, dtype=np.complex128)
    g = np.ascontiguousarray(f2, dtype=np.complex128)
    v = np.ascontiguousarray(y2, dtype=np.complex128)
    h = np.ascontiguousarray(f3, dtype=np.complex128)
    w = np.ascontiguousarray(y3, dtype=np.complex128)
    # the (2,3) factor does not depend on the outer index
    cdef double complex[:, ::1] E23 = np.exp(c23 * np.outer(v, w)) * g[:, None] * h[None, :]
    cdef double complex[::1] vv = v
    cdef double complex[::1] ww = w
    cdef Py_ssize_t i, j, k, n1 = a.shape[0], n2 = vv.shape[0], n3 = ww.shape[0]
    part = np.zeros(n1, dtype=np.complex128)
    cdef double complex[::1] pv = part
    cdef double complex mid, inner
    cdef double complex *e13
    for i in prange(n1, nogil=True, num_threads=_threads, schedule="static"):
        e13 = <double complex *> malloc(n3 * sizeof(double complex))
        for k in range(n3):
            e13[k] = cexp(c13 * u[i] * ww[k])
        mid = 0
        for j in range(n2):
            inner = 0
            for k in range(n3):
                inner = inner + E23[j, k] * e13[k]
            mid = mid + cexp(c12 * u[i] * vv[j]) * inner
        pv[i] = a[i] * mid
        free(e13)
    return complex(np.sum(part))
