"""Pure-Python (numpy) implementation of the hot numerical kernels.

This module mirrors ``_kernels.pyx`` function for function and is selected
automatically when the compiled extension is unavailable.  Every routine
takes and returns float64 numpy arrays and reports failures through a status
code instead of raising, so both backends share one calling convention.
"""

from __future__ import annotations

import math

import numpy as np

NAME = "python"


def jacobi_eigen(a, max_sweeps=100, tol=1e-12):
    """Cyclic Jacobi eigensolver for a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors, sweeps)`` with eigenvalues in the
    order they appear on the rotated diagonal (unsorted).  ``sweeps`` is -1
    when the iteration cap was hit before convergence.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    norm_f = math.sqrt(float(np.sum(a * a)))
    target = tol * norm_f
    for sweep in range(max_sweeps + 1):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        off = math.sqrt(off)
        if off <= target:
            return np.diag(a).copy(), v, sweep
        if sweep == max_sweeps:
            break
        # threshold sweep: skip small entries during the first sweeps
        thresh = 0.2 * off / (n * n) if sweep < 3 else 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= thresh or apq == 0.0:
                    continue
                diff = a[q, q] - a[p, p]
                if abs(diff) > 1e150 * abs(apq):
                    t = apq / diff          # theta would overflow; t ~ 1/(2 theta)
                else:
                    theta = diff / (2.0 * apq)
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    return np.diag(a).copy(), v, -1


def lu_solve(a, b, pivot_tol):
    """Gaussian elimination with partial pivoting.

    ``b`` may be a vector or a matrix of right-hand sides.  Returns
    ``(x, status)``; status 1 flags a pivot smaller than ``pivot_tol``.
    """
    a = np.array(a, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    n = a.shape[0]
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if abs(a[piv, k]) < pivot_tol or a[piv, k] == 0.0:
            return None, 1
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            b[[k, piv]] = b[[piv, k]]
        if k + 1 < n:
            factors = a[k + 1:, k] / a[k, k]
            a[k + 1:, k:] -= np.outer(factors, a[k, k:])
            b[k + 1:] -= np.outer(factors, b[k])
    x = np.zeros_like(b)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - a[k, k + 1:] @ x[k + 1:]) / a[k, k]
    return (x[:, 0] if vec else x), 0


def cholesky_solve(h, rhs, shift):
    """Solve ``(h + shift*I) x = rhs`` by Cholesky; status 1 if not SPD."""
    n = h.shape[0]
    l = np.zeros((n, n))
    for j in range(n):
        d = h[j, j] + shift - l[j, :j] @ l[j, :j]
        if not d > 0.0:
            return None, 1
        ljj = math.sqrt(d)
        l[j, j] = ljj
        if j + 1 < n:
            l[j + 1:, j] = (h[j + 1:, j] - l[j + 1:, :j] @ l[j, :j]) / ljj
    z = np.zeros(n)
    for i in range(n):
        z[i] = (rhs[i] - l[i, :i] @ z[:i]) / l[i, i]
    x = np.zeros(n)
    for i in range(n - 1, -1, -1):
        x[i] = (z[i] - l[i + 1:, i] @ x[i + 1:]) / l[i, i]
    return x, 0


def _pairs(p):
    ii, jj = np.nonzero(~np.eye(p, dtype=bool))
    return ii, jj


def pair_slacks(pts, y, g, nu):
    """Slack of every ordered-pair interpolation inequality, i != j."""
    ii, jj = _pairs(pts.shape[0])
    d = pts[jj] - pts[ii]
    dg = g[jj] - g[ii]
    return (y[ii] - y[jj]
            + 0.5 * np.einsum("ij,ij->i", g[ii] + g[jj], d)
            + 0.25 * nu * np.einsum("ij,ij->i", d, d)
            - 0.25 / nu * np.einsum("ij,ij->i", dg, dg))


def barrier_terms(pts, y, g, nu):
    """Log-barrier value pieces over the full variable vector (y, g).

    Variable layout: ``y_i`` at index ``i`` and component ``k`` of ``g_i``
    at index ``p + i*n + k`` where ``p`` is the number of points.

    Returns ``(slacks, grad, hess, status)`` where ``grad`` and ``hess`` are
    the gradient and Hessian of ``-sum(log(slacks))``.  status 1 means some
    slack is nonpositive, in which case grad and hess are None.
    """
    p, n = pts.shape
    nvar = p * (n + 1)
    ii, jj = _pairs(p)
    m = ii.size
    d = pts[jj] - pts[ii]
    dg = g[jj] - g[ii]
    c = (y[ii] - y[jj]
         + 0.5 * np.einsum("ij,ij->i", g[ii] + g[jj], d)
         + 0.25 * nu * np.einsum("ij,ij->i", d, d)
         - 0.25 / nu * np.einsum("ij,ij->i", dg, dg))
    if np.any(c <= 0.0):
        return c, None, None, 1
    jac = np.zeros((m, nvar))
    rows = np.arange(m)
    jac[rows, ii] = 1.0
    jac[rows, jj] = -1.0
    gi_grad = 0.5 * d + 0.5 / nu * dg
    gj_grad = 0.5 * d - 0.5 / nu * dg
    cols = np.arange(n)
    jac[rows[:, None], p + ii[:, None] * n + cols] += gi_grad
    jac[rows[:, None], p + jj[:, None] * n + cols] += gj_grad
    inv = 1.0 / c
    grad = -(jac.T @ inv)
    hess = (jac.T * (inv * inv)) @ jac
    # curvature of each constraint acts on (g_i - g_j) only
    w = 0.5 / nu * inv
    gblock = np.zeros((p, p))
    np.add.at(gblock, (ii, ii), w)
    np.add.at(gblock, (jj, jj), w)
    np.add.at(gblock, (ii, jj), -w)
    np.add.at(gblock, (jj, ii), -w)
    hess[p:, p:] += np.kron(gblock, np.eye(n))
    return c, grad, hess, 0
