# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled tridiagonal kernels.

Every radial operator in the package reduces to a symmetric tridiagonal
system, so these few loops carry nearly all of the runtime.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow

cnp.import_array()


def tridiag_factor(const double[:] sub, const double[:] diag, const double[:] sup):
    """Thomas forward elimination; returns (pivots, multipliers)."""
    cdef Py_ssize_t n = diag.shape[0], i
    piv = np.empty(n)
    mul = np.empty(n)
    cdef double[:] p = piv, m = mul
    p[0] = diag[0]
    m[0] = 0.0
    for i in range(1, n):
        m[i] = sub[i - 1] / p[i - 1]
        p[i] = diag[i] - m[i] * sup[i - 1]
    return piv, mul


cdef void _factored_solve(const double[:] sup, const double[:] p, const double[:] m,
                          const double[:] rhs, double[:] x) nogil:
    cdef Py_ssize_t n = p.shape[0], i
    x[0] = rhs[0]
    for i in range(1, n):
        x[i] = rhs[i] - m[i] * x[i - 1]
    x[n - 1] = x[n - 1] / p[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = (x[i] - sup[i] * x[i + 1]) / p[i]


def tridiag_factored_solve(const double[:] sup, const double[:] piv,
                           const double[:] mul, const double[:] rhs):
    out = np.empty(piv.shape[0])
    cdef double[:] x = out
    _factored_solve(sup, piv, mul, rhs, x)
    return out


def tridiag_solve(const double[:] sub, const double[:] diag, const double[:] sup,
                  const double[:] rhs):
    piv, mul = tridiag_factor(sub, diag, sup)
    return tridiag_factored_solve(sup, piv, mul, rhs)


def tridiag_matvec(const double[:] sub, const double[:] diag, const double[:] sup,
                   const double[:] x):
    cdef Py_ssize_t n = diag.shape[0], i
    out = np.empty(n)
    cdef double[:] y = out
    for i in range(n):
        y[i] = diag[i] * x[i]
        if i > 0:
            y[i] += sub[i - 1] * x[i - 1]
        if i < n - 1:
            y[i] += sup[i] * x[i + 1]
    return out


def monotone_iterate(const double[:] sub, const double[:] diag, const double[:] sup,
                     const double[:] vol, const double[:] bc, double lam, double q,
                     const double[:] w0, const double[:] lower, double tol,
                     Py_ssize_t maxiter, double slack):
    """Run the shifted fixed-point map from a supersolution.

    Solves (S + lam*V) w_new = V*(lam*w - |w|^(q-1) w) + bc repeatedly, where
    S is the volume-weighted operator. Stops when the sup-norm increment
    drops below tol * max|w|, or the gap to `lower` below slack * max|w|.
    Each step must not increase w and must stay above `lower` (up to
    `slack`); the first offending node is reported.

    Returns (w, iterations, increment, bad_iteration, bad_node, bad_kind)
    with bad_kind 0 = none, 1 = increase, 2 = below lower bound.
    """
    cdef Py_ssize_t n = diag.shape[0], i, it
    cdef double[:] d2 = np.empty(n)
    for i in range(n):
        d2[i] = diag[i] + lam * vol[i]
    piv, mul = tridiag_factor(sub, d2, sup)
    cdef double[:] p = piv, m = mul
    w_arr = np.array(w0, dtype=np.float64)
    new_arr = np.empty(n)
    rhs_arr = np.empty(n)
    cdef double[:] w = w_arr, wn = new_arr, rhs = rhs_arr
    cdef double inc = 0.0, scale, gap, a, wi
    cdef Py_ssize_t bad_it = -1, bad_node = -1
    cdef int bad_kind = 0
    it = 0
    with nogil:
        while it < maxiter:
            it += 1
            for i in range(n):
                wi = w[i]
                a = fabs(wi)
                rhs[i] = vol[i] * (lam * wi - pow(a, q - 1.0) * wi) + bc[i]
            _factored_solve(sup, p, m, rhs, wn)
            inc = 0.0
            scale = 0.0
            gap = -1e300
            for i in range(n):
                if bad_kind == 0:
                    if wn[i] > w[i] + slack * (fabs(w[i]) + 1e-300):
                        bad_kind = 1
                        bad_it = it
                        bad_node = i
                    elif wn[i] < lower[i] - slack * (fabs(lower[i]) + 1e-300):
                        bad_kind = 2
                        bad_it = it
                        bad_node = i
                a = fabs(wn[i] - w[i])
                if a > inc:
                    inc = a
                if fabs(wn[i]) > scale:
                    scale = fabs(wn[i])
                if wn[i] - lower[i] > gap:
                    gap = wn[i] - lower[i]
                w[i] = wn[i]
            if bad_kind != 0:
                break
            # converged, or squeezed onto the lower bound
            if inc <= tol * (scale + 1e-300) or gap <= slack * (scale + 1e-300):
                break
    return w_arr, it, inc, bad_it, bad_node, bad_kind
