"""Small dense linear algebra toolkit.

Matrices are plain float64 numpy arrays; numpy is used as storage and for
elementwise arithmetic only.  The factorizations themselves (Jacobi
eigensolver, Householder QR, LU with partial pivoting) are implemented here
or in the kernel backend.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from interp_lab._backend import kernels
from interp_lab.errors import NoConvergence, NotSymmetric, SingularMatrix

SYMMETRY_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100
JACOBI_TOL = 1e-12
PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending; column ``i`` of ``vectors`` pairs with
    ``values[i]``."""

    values: np.ndarray
    vectors: np.ndarray
    sweeps: int = 0

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


def norm_inf(a) -> float:
    """Max absolute row sum (vector max-norm for 1-D input)."""
    a = np.asarray(a, dtype=float)
    if a.size == 0:
        return 0.0
    if a.ndim == 1:
        return float(np.max(np.abs(a)))
    return float(np.max(np.sum(np.abs(a), axis=1)))


def as_matrix(a) -> np.ndarray:
    m = np.array(a, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def sym_eigen(a) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix by cyclic Jacobi.

    Raises
    ------
    NotSymmetric
        If ``a`` departs from symmetry by more than 1e-12 relative.
    NoConvergence
        If the sweep cap is reached.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise NotSymmetric(f"matrix is not square: {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))) if a.size else 0.0)
    if a.size and float(np.max(np.abs(a - a.T))) > SYMMETRY_TOL * scale:
        raise NotSymmetric("matrix asymmetry exceeds 1e-12 relative tolerance")
    sym = 0.5 * (a + a.T)
    vals, vecs, sweeps = kernels.jacobi_eigen(sym, JACOBI_MAX_SWEEPS, JACOBI_TOL)
    if sweeps < 0:
        raise NoConvergence(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    order = np.argsort(-vals, kind="stable")
    return EigenDecomposition(np.asarray(vals)[order], np.asarray(vecs)[:, order], sweeps)


def inertia(values, scale: float) -> tuple[int, int, int]:
    """Count (positive, negative, zero) eigenvalues with threshold
    ``1e-9 * max(1, scale)``."""
    tau = 1e-9 * max(1.0, scale)
    values = np.asarray(values)
    pos = int(np.sum(values > tau))
    neg = int(np.sum(values < -tau))
    return pos, neg, values.size - pos - neg


def qr(a) -> tuple[np.ndarray, np.ndarray]:
    """Thin Householder QR of a tall matrix.

    Returns ``q`` (rows x cols, orthonormal columns) and ``r`` (cols x cols,
    upper triangular).  Rank deficiency shows up as (near) zero diagonal
    entries of ``r``; callers must check.
    """
    a = as_matrix(a)
    m, n = a.shape
    if m < n:
        raise ValueError("qr requires rows >= cols")
    r = a.copy()
    reflectors = []
    for k in range(n):
        x = r[k:, k]
        s = float(np.max(np.abs(x)))
        if s == 0.0:
            reflectors.append(None)
            continue
        # the reflector is scale invariant; build it from x / s so tiny
        # columns do not lose bits to subnormal arithmetic
        v = x / s
        alpha = float(np.sqrt(v @ v))
        v[0] += alpha if v[0] >= 0 else -alpha
        v /= np.sqrt(v @ v)
        r[k:, k:] -= 2.0 * np.outer(v, v @ r[k:, k:])
        reflectors.append(v)
    q = np.eye(m)[:, :n]
    for k in range(n - 1, -1, -1):
        v = reflectors[k]
        if v is None:
            continue
        q[k:, :] -= 2.0 * np.outer(v, v @ q[k:, :])
    r = np.triu(r[:n, :])
    return q, r


def solve(a, b) -> np.ndarray:
    """Solve ``a x = b`` by LU with partial pivoting.

    ``b`` may hold several right-hand sides as columns.

    Raises
    ------
    SingularMatrix
        When a pivot falls below ``1e-12 * ||a||_inf``.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("solve requires a square matrix")
    b = np.asarray(b, dtype=float)
    tol = PIVOT_TOL * norm_inf(a)
    x, status = kernels.lu_solve(a, b, tol)
    if status:
        raise SingularMatrix("pivot below 1e-12 relative to ||a||_inf")
    return np.asarray(x)


def inverse(a) -> np.ndarray:
    a = as_matrix(a)
    return solve(a, np.eye(a.shape[0]))


def cond_inf(a) -> float:
    """Infinity-norm condition number, ``inf`` for singular input."""
    try:
        return norm_inf(a) * norm_inf(inverse(a))
    except SingularMatrix:
        return float("inf")
