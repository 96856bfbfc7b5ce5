# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_kernels_py.py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

NAME = "cython"


def jacobi_eigen(a_in, int max_sweeps=100, double tol=1e-12):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] arr = np.array(a_in, dtype=np.float64, copy=True, order="C")
    cdef Py_ssize_t n = arr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] varr = np.eye(n)
    cdef double[:, ::1] a = arr
    cdef double[:, ::1] v = varr
    cdef Py_ssize_t p, q, k
    cdef int sweep
    cdef double off, norm_f = 0.0, target, thresh, apq, diff, theta, t, c, s, x, y
    for p in range(n):
        for q in range(n):
            norm_f += a[p, q] * a[p, q]
    target = tol * sqrt(norm_f)
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        off = sqrt(off)
        if off <= target:
            return np.diag(arr).copy(), varr, sweep
        if sweep == max_sweeps:
            break
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if fabs(apq) <= thresh or apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if fabs(diff) > 1e150 * fabs(apq):
                    t = apq / diff          # theta would overflow; t ~ 1/(2 theta)
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * y
                    a[k, q] = s * x + c * y
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * y
                    v[k, q] = s * x + c * y
    return np.diag(arr).copy(), varr, -1


def lu_solve(a_in, b_in, double pivot_tol):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] arr = np.array(a_in, dtype=np.float64, copy=True, order="C")
    b_np = np.array(b_in, dtype=np.float64, copy=True)
    vec = b_np.ndim == 1
    if vec:
        b_np = b_np[:, None]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] barr = np.ascontiguousarray(b_np)
    cdef double[:, ::1] a = arr
    cdef double[:, ::1] b = barr
    cdef Py_ssize_t n = a.shape[0], nr = b.shape[1]
    cdef Py_ssize_t i, j, k, piv
    cdef double best, f, tmp
    for k in range(n):
        piv = k
        best = fabs(a[k, k])
        for i in range(k + 1, n):
            if fabs(a[i, k]) > best:
                best = fabs(a[i, k])
                piv = i
        if best < pivot_tol or best == 0.0:
            return None, 1
        if piv != k:
            for j in range(n):
                tmp = a[k, j]; a[k, j] = a[piv, j]; a[piv, j] = tmp
            for j in range(nr):
                tmp = b[k, j]; b[k, j] = b[piv, j]; b[piv, j] = tmp
        for i in range(k + 1, n):
            f = a[i, k] / a[k, k]
            if f == 0.0:
                continue
            for j in range(k, n):
                a[i, j] -= f * a[k, j]
            for j in range(nr):
                b[i, j] -= f * b[k, j]
    for j in range(nr):
        for k in range(n - 1, -1, -1):
            tmp = b[k, j]
            for i in range(k + 1, n):
                tmp -= a[k, i] * b[i, j]
            b[k, j] = tmp / a[k, k]
    if vec:
        return barr[:, 0].copy(), 0
    return barr, 0


def cholesky_solve(h_in, rhs_in, double shift):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] harr = np.ascontiguousarray(h_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] rarr = np.ascontiguousarray(rhs_in, dtype=np.float64)
    cdef Py_ssize_t n = harr.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] larr = np.zeros((n, n))
    cdef cnp.ndarray[cnp.float64_t, ndim=1] xarr = np.zeros(n)
    cdef double[:, ::1] h = harr
    cdef double[:, ::1] l = larr
    cdef double[::1] r = rarr
    cdef double[::1] x = xarr
    cdef Py_ssize_t i, j, k
    cdef double d, ljj, acc
    for j in range(n):
        d = h[j, j] + shift
        for k in range(j):
            d -= l[j, k] * l[j, k]
        if not d > 0.0:
            return None, 1
        ljj = sqrt(d)
        l[j, j] = ljj
        for i in range(j + 1, n):
            acc = h[i, j]
            for k in range(j):
                acc -= l[i, k] * l[j, k]
            l[i, j] = acc / ljj
    for i in range(n):
        acc = r[i]
        for k in range(i):
            acc -= l[i, k] * x[k]
        x[i] = acc / l[i, i]
    for i in range(n - 1, -1, -1):
        acc = x[i]
        for k in range(i + 1, n):
            acc -= l[k, i] * x[k]
        x[i] = acc / l[i, i]
    return xarr, 0


cdef inline double _slack(double[:, ::1] pts, double[::1] y, double[:, ::1] g,
                          double nu, Py_ssize_t i, Py_ssize_t j) nogil:
    cdef Py_ssize_t k, n = pts.shape[1]
    cdef double dk, gk, c = y[i] - y[j]
    for k in range(n):
        dk = pts[j, k] - pts[i, k]
        gk = g[j, k] - g[i, k]
        c += 0.5 * (g[i, k] + g[j, k]) * dk + 0.25 * nu * dk * dk - 0.25 / nu * gk * gk
    return c


def pair_slacks(pts_in, y_in, g_in, double nu):
    cdef double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef double[:, ::1] g = np.ascontiguousarray(g_in, dtype=np.float64)
    cdef Py_ssize_t p = pts.shape[0], i, j, r = 0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(p * (p - 1))
    for i in range(p):
        for j in range(p):
            if i != j:
                out[r] = _slack(pts, y, g, nu, i, j)
                r += 1
    return out


def barrier_terms(pts_in, y_in, g_in, double nu):
    cdef double[:, ::1] pts = np.ascontiguousarray(pts_in, dtype=np.float64)
    cdef double[::1] y = np.ascontiguousarray(y_in, dtype=np.float64)
    cdef double[:, ::1] g = np.ascontiguousarray(g_in, dtype=np.float64)
    cdef Py_ssize_t p = pts.shape[0], n = pts.shape[1]
    cdef Py_ssize_t nvar = p * (n + 1), m = p * (p - 1)
    cdef Py_ssize_t i, j, k, a, b, r = 0, nnz
    cdef cnp.ndarray[cnp.float64_t, ndim=1] carr = np.empty(m)
    cdef double[::1] c = carr
    for i in range(p):
        for j in range(p):
            if i != j:
                c[r] = _slack(pts, y, g, nu, i, j)
                if c[r] <= 0.0:
                    return carr, None, None, 1
                r += 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] grad_arr = np.zeros(nvar)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] hess_arr = np.zeros((nvar, nvar))
    cdef double[::1] grad = grad_arr
    cdef double[:, ::1] hess = hess_arr
    # sparse row of one constraint gradient: 2 + 2n nonzeros
    cdef Py_ssize_t[::1] idx = np.empty(2 + 2 * n, dtype=np.intp)
    cdef double[::1] val = np.empty(2 + 2 * n)
    cdef double inv, inv2, w, dk, gk
    nnz = 2 + 2 * n
    r = 0
    for i in range(p):
        for j in range(p):
            if i == j:
                continue
            inv = 1.0 / c[r]
            inv2 = inv * inv
            r += 1
            idx[0] = i
            val[0] = 1.0
            idx[1] = j
            val[1] = -1.0
            for k in range(n):
                dk = pts[j, k] - pts[i, k]
                gk = g[j, k] - g[i, k]
                idx[2 + k] = p + i * n + k
                val[2 + k] = 0.5 * dk + 0.5 / nu * gk
                idx[2 + n + k] = p + j * n + k
                val[2 + n + k] = 0.5 * dk - 0.5 / nu * gk
            for a in range(nnz):
                grad[idx[a]] -= val[a] * inv
                for b in range(nnz):
                    hess[idx[a], idx[b]] += val[a] * val[b] * inv2
            w = 0.5 / nu * inv
            for k in range(n):
                hess[p + i * n + k, p + i * n + k] += w
                hess[p + j * n + k, p + j * n + k] += w
                hess[p + i * n + k, p + j * n + k] -= w
                hess[p + j * n + k, p + i * n + k] -= w
    return carr, grad_arr, hess_arr, 0
