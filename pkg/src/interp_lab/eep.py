"""Numerical sharp bound: the finite-dimensional error estimation problem.

Maximize ``sum_i l_i y_i`` over values ``y_i`` and gradients ``g_i`` at the
query point and the samples, subject to the pairwise interpolation
inequalities of the class C^{1,1}_nu for every ordered pair (i, j):

    y_i - y_j + 1/2 (g_i + g_j).(x_j - x_i) + nu/4 ||x_j - x_i||^2
        - 1/(4 nu) ||g_j - g_i||^2 >= 0.

Solved by a primal log-barrier method with damped Newton steps after
translating x to the origin and scaling the geometry to unit size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from interp_lab import geometry, linalg
from interp_lab._backend import kernels
from interp_lab.errors import NoConvergence, NumericalBreakdown
from interp_lab.geometry import BarycentricData, InterpolationInstance

MAX_NEWTON = 500
ARMIJO = 1e-4
MU0 = 1.0
MU_FACTOR = 10.0
REG = 1e-12


@dataclass(frozen=True)
class FixPointZero:
    """y_0 = 0 and g_0 = 0."""


@dataclass(frozen=True)
class FixSampleValues:
    """Prescribed values at the n+1 samples (an affine shift of f)."""

    values: tuple


@dataclass(frozen=True)
class EepProblem:
    inst: InterpolationInstance
    bary: BarycentricData
    gauge: object
    pts: np.ndarray          # scaled points, query point first and at the origin
    length: float            # geometric scale factor
    free: np.ndarray         # indices of free entries of the stacked (y, g) vector
    fixed: np.ndarray        # full vector carrying the gauge-fixed values (scaled)
    dist2: np.ndarray        # ||x_j - x_i||^2 in original units, pair order

    @property
    def n_vars(self) -> int:
        return int(self.free.size)

    @property
    def n_constraints(self) -> int:
        p = self.pts.shape[0]
        return p * (p - 1)

    @property
    def n_raw(self) -> int:
        p, n = self.pts.shape
        return p * (n + 1)


@dataclass(frozen=True)
class EepSolution:
    objective: float
    y: np.ndarray
    g: np.ndarray
    iterations: int
    barrier_mu_final: float
    max_constraint_violation: float
    kkt_residual: float


def build(inst: InterpolationInstance, gauge=None) -> EepProblem:
    """Assemble the gauged problem; the default gauge fixes the query point.

    Raises
    ------
    DegenerateSampleSet
        If the samples are affinely dependent.
    """
    bary = geometry.barycentric(inst)
    gauge = FixPointZero() if gauge is None else gauge
    pts_raw = inst.points - inst.x
    length = float(np.max(np.linalg.norm(pts_raw, axis=1)))
    if length == 0.0:
        length = 1.0
    pts = pts_raw / length
    p, n = pts.shape
    nvar = p * (n + 1)
    fixed = np.zeros(nvar)
    if isinstance(gauge, FixPointZero):
        drop = [0] + [p + k for k in range(n)]
    elif isinstance(gauge, FixSampleValues):
        vals = np.asarray(gauge.values, dtype=float)
        if vals.shape != (n + 1,):
            raise ValueError(f"FixSampleValues needs {n + 1} values")
        fixed[1:p] = vals / (inst.nu * length ** 2)
        drop = list(range(1, p))
    else:
        raise TypeError(f"unknown gauge {gauge!r}")
    free = np.setdiff1d(np.arange(nvar), drop)
    d = pts_raw[None, :, :] - pts_raw[:, None, :]
    d2 = np.sum(d * d, axis=-1)
    dist2 = d2[~np.eye(p, dtype=bool)]
    return EepProblem(inst, bary, gauge, pts, length, free, fixed, dist2)


def _split(full, p, n):
    return full[:p], full[p:].reshape(p, n)


def _start(prob: EepProblem) -> np.ndarray:
    full = prob.fixed.copy()
    if isinstance(prob.gauge, FixSampleValues):
        p, n = prob.pts.shape
        # the affine interpolant of the fixed values is strictly feasible
        a = np.hstack([np.ones((n + 1, 1)), prob.pts[1:]])
        coef = linalg.solve(a, full[1:p])
        full[0] = coef[0]
        full[p:] = np.tile(coef[1:], p)
    return full


def solve(prob: EepProblem, tol: float = 1e-6) -> EepSolution:
    """Log-barrier interior-point solve.

    Stops once the gap surrogate ``m * mu`` (m constraints, mu the barrier
    weight) is at most ``tol * (1 + |objective|)`` in original units.

    Raises
    ------
    NoConvergence
        After 500 Newton steps in total.
    NumericalBreakdown
        If the Newton system stays indefinite under regularization.
    """
    if not 0.0 < tol <= 1e-2:
        raise ValueError("tol must lie in (0, 1e-2]")
    p, n = prob.pts.shape
    m = prob.n_constraints
    unit = prob.inst.nu * prob.length ** 2
    free = prob.free
    cvec = np.zeros(p * (n + 1))
    cvec[:p] = prob.bary.ell
    cf = cvec[free]
    full = _start(prob)
    if np.min(np.linalg.norm(prob.pts[1:], axis=1)) <= 1e-12:
        # x is a sample point: the interpolant is exact there
        y, g = _split(full, p, n)
        return EepSolution(0.0, unit * y, prob.inst.nu * prob.length * g, 0, 0.0, 0.0, 0.0)

    def barrier_value(vec, t):
        y, g = _split(vec, p, n)
        c = kernels.pair_slacks(prob.pts, y, g, 1.0)
        if np.any(c <= 0.0):
            return math.inf
        return -t * float(cvec @ vec) - float(np.sum(np.log(c)))

    t = 1.0 / MU0
    steps = 0
    grad = np.zeros(free.size)
    while True:
        while True:
            y, g = _split(full, p, n)
            c, bgrad, bhess, status = kernels.barrier_terms(prob.pts, y, g, 1.0)
            if status:
                raise NumericalBreakdown("iterate left the strictly feasible region")
            grad = -t * cf + bgrad[free]
            hess = bhess[np.ix_(free, free)]
            dz = _newton_direction(hess, grad)
            dec = -float(grad @ dz)
            if dec <= 1e-10:
                break
            if steps >= MAX_NEWTON:
                raise NoConvergence(f"barrier method exceeded {MAX_NEWTON} Newton steps")
            steps += 1
            f0 = barrier_value(full, t)
            step = 1.0
            while True:
                trial = full.copy()
                trial[free] += step * dz
                ft = barrier_value(trial, t)
                if ft <= f0 - ARMIJO * step * dec:
                    break
                step *= 0.5
                if step < 1e-14:
                    break
            if step < 1e-14:
                break
            full = trial
            # decrease lost in roundoff of the barrier value: centered as well as we can
            if f0 - ft <= 1e-13 * (1.0 + abs(f0)):
                break
        obj = float(cvec @ full)
        if unit * m / t <= tol * (1.0 + abs(unit * obj)):
            break
        t *= MU_FACTOR

    y, g = _split(full, p, n)
    c = kernels.pair_slacks(prob.pts, y, g, 1.0)
    kkt = float(np.max(np.abs(grad))) / t if grad.size else 0.0
    y_out = unit * y
    g_out = prob.inst.nu * prob.length * g
    return EepSolution(
        objective=unit * float(cvec @ full),
        y=y_out,
        g=g_out,
        iterations=steps,
        barrier_mu_final=1.0 / t,
        max_constraint_violation=float(max(0.0, -np.min(c))) * unit,
        kkt_residual=kkt,
    )


def _newton_direction(hess, grad):
    scale = max(1.0, float(np.max(np.abs(np.diag(hess)))))
    shift = 0.0
    while True:
        dz, status = kernels.cholesky_solve(hess, -grad, shift)
        if not status:
            return np.asarray(dz)
        shift = REG * scale if shift == 0.0 else shift * 100.0
        if shift > 1e-2 * scale:
            raise NumericalBreakdown("Newton system is not positive definite")


def sharp_bound(inst: InterpolationInstance, tol: float = 1e-6) -> float:
    """Sharp bound on |f_hat(x) - f(x)| over C^{1,1}_nu, computed numerically."""
    return solve(build(inst), tol).objective


def check_solution(prob: EepProblem, y, g) -> float:
    """Most negative constraint slack (original units) of given (y, g) data,
    translated to the problem's frame.  Useful for feeding witness data."""
    p, n = prob.pts.shape
    unit = prob.inst.nu * prob.length ** 2
    ys = np.asarray(y, dtype=float) / unit
    gs = np.asarray(g, dtype=float) / (prob.inst.nu * prob.length)
    c = kernels.pair_slacks(prob.pts, ys, gs, 1.0)
    return float(np.min(c)) * unit
