# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: tridiagonal QL eigensolver, Jacobi series, Bessel ladders.

Mirrors gpswf._kernels_py; selected automatically by gpswf.backend when the
extension compiled.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport (ceil, copysign, cos, exp, fabs, hypot, lgamma, log,
                        sin, sqrt, M_PI)

from ._phase import reduce_mod_2pi

cnp.import_array()

BACKEND_NAME = "cython"

cdef double _EPS = np.finfo(float).eps
cdef int _MAX_QL_ITER = 64
cdef double _RESCALE = 2.0 ** 600
cdef double _RESCALE_LOG2 = 600.0
cdef double _MILLER_X_MAX = 370.0


def tridiag_eig(diag, offdiag):
    """Full eigendecomposition of a symmetric tridiagonal matrix.

    Implicit-shift QL with Wilkinson shifts and eigenvector accumulation;
    identical contract to the pure-Python fallback.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] d = \
        np.array(diag, dtype=np.float64, copy=True)
    cdef Py_ssize_t n = d.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] e = np.zeros(n, dtype=np.float64)
    if n > 1:
        e[: n - 1] = offdiag
    cdef cnp.ndarray[cnp.float64_t, ndim=2] z = np.eye(n, dtype=np.float64)
    cdef Py_ssize_t l, m, i, k, it
    cdef double dd, g, r, s, c, p, f, b, zk, zk1
    cdef bint underflow
    for l in range(n):
        for it in range(_MAX_QL_ITER):
            m = l
            while m < n - 1:
                dd = fabs(d[m]) + fabs(d[m + 1])
                if fabs(e[m]) <= _EPS * dd:
                    break
                m += 1
            if m == l:
                break
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + copysign(r, g))
            s = 1.0
            c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                for k in range(n):
                    zk = z[k, i]
                    zk1 = z[k, i + 1]
                    z[k, i + 1] = s * zk + c * zk1
                    z[k, i] = c * zk - s * zk1
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
        else:
            raise RuntimeError(f"QL iteration failed to converge at index {l}")
    order = np.argsort(d, kind="stable")
    return d[order], np.ascontiguousarray(z[:, order])


def jacobi_series(coef, rec, double p0, x, int nderiv=0):
    """Clenshaw evaluation of an orthonormal-Jacobi series and derivatives.

    Same contract as the fallback: returns shape (nderiv + 1, len(x)).
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] cf = \
        np.ascontiguousarray(coef, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] a = \
        np.ascontiguousarray(rec, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xs = \
        np.atleast_1d(np.ascontiguousarray(x, dtype=np.float64))
    cdef Py_ssize_t m = cf.shape[0]
    cdef Py_ssize_t npts = xs.shape[0]
    out_arr = np.zeros((nderiv + 1, npts), dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = out_arr
    if m == 0:
        return out_arr
    cdef Py_ssize_t j, k
    cdef double xv, u0, u1, u2, d10, d11, d12, d20, d21, d22, inv_a, ratio
    for j in range(npts):
        xv = xs[j]
        u1 = 0.0
        u2 = 0.0
        d11 = 0.0
        d12 = 0.0
        d21 = 0.0
        d22 = 0.0
        for k in range(m - 1, -1, -1):
            inv_a = 1.0 / a[k + 1]
            ratio = a[k + 1] / a[k + 2]
            u0 = cf[k] + xv * u1 * inv_a - ratio * u2
            if nderiv >= 1:
                d10 = (u1 + xv * d11) * inv_a - ratio * d12
            if nderiv >= 2:
                d20 = (2.0 * d11 + xv * d21) * inv_a - ratio * d22
            u2 = u1
            u1 = u0
            if nderiv >= 1:
                d12 = d11
                d11 = d10
            if nderiv >= 2:
                d22 = d21
                d21 = d20
        out[0, j] = u1 * p0
        if nderiv >= 1:
            out[1, j] = d11 * p0
        if nderiv >= 2:
            out[2, j] = d21 * p0
    return out_arr


cdef double _hankel_j(double nu, double x):
    cdef double mu = 4.0 * nu * nu
    cdef double inv8x = 0.125 / x
    cdef double p = 1.0
    cdef double q = 0.0
    cdef double term = 1.0
    cdef double sign = 1.0
    cdef double prev = 1e308
    cdef int k = 1
    cdef double omega
    while k <= 40:
        term *= (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) * inv8x / k
        if fabs(term) > prev:
            break
        prev = fabs(term)
        if k % 2 == 1:
            q += sign * term
        else:
            sign = -sign
            p += sign * term
        if fabs(term) < 1e-18:
            break
        k += 1
    omega = <double> reduce_mod_2pi(x) - (0.5 * nu + 0.25) * M_PI
    return sqrt(2.0 / (M_PI * x)) * (p * cos(omega) - q * sin(omega))


def bessel_ladder(double nu0, int count, double x):
    """J_{nu0+j}(x) for j = 0..count-1, nu0 in [-0.5, 0.5), x >= 0."""
    out_arr = np.zeros(count, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = out_arr
    cdef cnp.ndarray[cnp.int64_t, ndim=1] outexp
    cdef Py_ssize_t j, jtop
    cdef double nu_top, vp1, v, vm1, neumann, cf, lg_nu0p1, log_norm
    cdef double sign_norm, t
    cdef long scale_count
    cdef Py_ssize_t kk
    if x == 0.0:
        if nu0 == 0.0:
            out[0] = 1.0
        return out_arr
    if x <= _MILLER_X_MAX or nu0 + count - 1 > 0.88 * x:
        # Miller backward recurrence + Neumann-sum normalization
        outexp = np.zeros(count, dtype=np.int64)
        nu_top = count + 1.0
        if 1.02 * x - nu0 > nu_top:
            nu_top = 1.02 * x - nu0
        jtop = <Py_ssize_t> ceil(nu_top + 12.0 * sqrt(x + 1.0) + 32.0)
        vp1 = 0.0
        v = 1e-30
        scale_count = 0
        neumann = 0.0
        lg_nu0p1 = lgamma(nu0 + 1.0)
        for j in range(jtop, -1, -1):
            if j < count:
                out[j] = v
                outexp[j] = scale_count
            if j % 2 == 0:
                kk = j // 2
                if kk == 0:
                    cf = exp(lg_nu0p1)
                else:
                    cf = (nu0 + j) * exp(lgamma(nu0 + kk) - lgamma(kk + 1.0))
                neumann += cf * v
            if j > 0:
                vm1 = (2.0 * (nu0 + j) / x) * v - vp1
                vp1 = v
                v = vm1
                if fabs(v) > _RESCALE:
                    v /= _RESCALE
                    vp1 /= _RESCALE
                    neumann /= _RESCALE
                    scale_count += 1
        log_norm = nu0 * log(0.5 * x) - log(fabs(neumann))
        sign_norm = copysign(1.0, neumann)
        for j in range(count):
            if out[j] == 0.0:
                continue
            t = (log(fabs(out[j])) + log_norm
                 + (outexp[j] - scale_count) * _RESCALE_LOG2 * log(2.0))
            if t < -745.0:
                out[j] = 0.0
            else:
                out[j] = copysign(exp(t), out[j] * sign_norm)
        return out_arr
    # large argument, all orders well below x: asymptotic bottom + upward
    out[0] = _hankel_j(nu0, x)
    if count > 1:
        out[1] = _hankel_j(nu0 + 1.0, x)
        for j in range(2, count):
            out[j] = (2.0 * (nu0 + j - 1) / x) * out[j - 1] - out[j - 2]
    return out_arr
