# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_kernels_py``.

Same signatures and semantics; Gaussian CDF via libc erfc.  Numeric
results may differ from the numpy fallback only in the last ulps.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, erfc, exp, sqrt

cnp.import_array()

cdef double SQRT1_2 = 0.7071067811865476
cdef double SQRT_2PI = 2.5066282746310002


cdef inline double _phi_cdf(double z) nogil:
    return 0.5 * erfc(-z * SQRT1_2)


cdef inline double _gelu(double u, double h) nogil:
    return u * _phi_cdf(u / h)


cdef inline double _gelu_grad(double u, double h) nogil:
    cdef double z = u / h
    return _phi_cdf(z) + z * exp(-0.5 * z * z) / SQRT_2PI


def bound_terms(mu0, mu1, double sigma, thresholds):
    cdef double[::1] m0 = np.ascontiguousarray(mu0, dtype=np.float64)
    cdef double[::1] m1 = np.ascontiguousarray(mu1, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(thresholds, dtype=np.float64)
    cdef Py_ssize_t n = m0.shape[0], nk = c.shape[0], i, k
    lam_arr = np.empty(n, dtype=np.float64)
    ups_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] lam = lam_arr
    cdef double[::1] ups = ups_arr
    cdef double f0, f0_prev, r0, s1, u, lam_i, ups_i
    with nogil:
        for i in range(n):
            f0_prev = 0.0
            lam_i = 0.0
            ups_i = 0.0
            for k in range(nk):
                f0 = _phi_cdf((c[k] - m0[i]) / sigma)
                r0 = f0 - f0_prev
                f0_prev = f0
                s1 = 1.0 - _phi_cdf((c[k] - m1[i]) / sigma)
                u = r0 + s1 - 1.0
                if u > 0.0:
                    lam_i += u
                ups_i += r0 if r0 < s1 else s1
            lam[i] = lam_i
            ups[i] = ups_i
    return lam_arr, ups_arr


def bound_terms_smooth(mu0, mu1, double sigma, thresholds, double h):
    cdef double[::1] m0 = np.ascontiguousarray(mu0, dtype=np.float64)
    cdef double[::1] m1 = np.ascontiguousarray(mu1, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(thresholds, dtype=np.float64)
    cdef Py_ssize_t n = m0.shape[0], nk = c.shape[0], i, k
    lam_arr = np.empty(n, dtype=np.float64)
    ups_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] lam = lam_arr
    cdef double[::1] ups = ups_arr
    cdef double f0, f0_prev, r0, s1, lam_i, ups_i
    with nogil:
        for i in range(n):
            f0_prev = 0.0
            lam_i = 0.0
            ups_i = 0.0
            for k in range(nk):
                f0 = _phi_cdf((c[k] - m0[i]) / sigma)
                r0 = f0 - f0_prev
                f0_prev = f0
                s1 = 1.0 - _phi_cdf((c[k] - m1[i]) / sigma)
                lam_i += _gelu(r0 + s1 - 1.0, h)
                ups_i += r0 - _gelu(r0 - s1, h)
            lam[i] = lam_i
            ups[i] = ups_i
    return lam_arr, ups_arr


def correction_terms(a, y, pi, mu0, mu1, double sigma, thresholds):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(pi, dtype=np.float64)
    cdef double[::1] m0 = np.ascontiguousarray(mu0, dtype=np.float64)
    cdef double[::1] m1 = np.ascontiguousarray(mu1, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(thresholds, dtype=np.float64)
    cdef Py_ssize_t n = m0.shape[0], nk = c.shape[0], i, k
    dl_arr = np.empty(n, dtype=np.float64)
    du_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] dl = dl_arr
    cdef double[::1] du = du_arr
    cdef double f0, f0_prev, r0, s1, lo, dr, ds, w0, w1, dl_i, du_i
    with nogil:
        for i in range(n):
            f0_prev = 0.0
            lo = -INFINITY
            dl_i = 0.0
            du_i = 0.0
            w0 = (1.0 - av[i]) / (1.0 - pv[i])
            w1 = av[i] / pv[i]
            for k in range(nk):
                f0 = _phi_cdf((c[k] - m0[i]) / sigma)
                r0 = f0 - f0_prev
                f0_prev = f0
                s1 = 1.0 - _phi_cdf((c[k] - m1[i]) / sigma)
                dr = w0 * ((1.0 if (yv[i] > lo and yv[i] <= c[k]) else 0.0) - r0)
                ds = w1 * ((1.0 if yv[i] > c[k] else 0.0) - s1)
                lo = c[k]
                if r0 + s1 - 1.0 > 0.0:
                    dl_i += dr + ds
                du_i += ds if r0 - s1 > 0.0 else dr
            dl[i] = dl_i
            du[i] = du_i
    return dl_arr, du_arr


def correction_terms_smooth(a, y, pi, mu0, mu1, double sigma, thresholds,
                            double h):
    cdef double[::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef double[::1] yv = np.ascontiguousarray(y, dtype=np.float64)
    cdef double[::1] pv = np.ascontiguousarray(pi, dtype=np.float64)
    cdef double[::1] m0 = np.ascontiguousarray(mu0, dtype=np.float64)
    cdef double[::1] m1 = np.ascontiguousarray(mu1, dtype=np.float64)
    cdef double[::1] c = np.ascontiguousarray(thresholds, dtype=np.float64)
    cdef Py_ssize_t n = m0.shape[0], nk = c.shape[0], i, k
    dl_arr = np.empty(n, dtype=np.float64)
    du_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] dl = dl_arr
    cdef double[::1] du = du_arr
    cdef double f0, f0_prev, r0, s1, lo, dr, ds, w0, w1, g, dl_i, du_i
    with nogil:
        for i in range(n):
            f0_prev = 0.0
            lo = -INFINITY
            dl_i = 0.0
            du_i = 0.0
            w0 = (1.0 - av[i]) / (1.0 - pv[i])
            w1 = av[i] / pv[i]
            for k in range(nk):
                f0 = _phi_cdf((c[k] - m0[i]) / sigma)
                r0 = f0 - f0_prev
                f0_prev = f0
                s1 = 1.0 - _phi_cdf((c[k] - m1[i]) / sigma)
                dr = w0 * ((1.0 if (yv[i] > lo and yv[i] <= c[k]) else 0.0) - r0)
                ds = w1 * ((1.0 if yv[i] > c[k] else 0.0) - s1)
                lo = c[k]
                dl_i += (dr + ds) * _gelu_grad(r0 + s1 - 1.0, h)
                du_i += dr - (dr - ds) * _gelu_grad(r0 - s1, h)
            dl[i] = dl_i
            du[i] = du_i
    return dl_arr, du_arr
