"""Worst-case functions that attain the error bounds, and numerical checks of
membership in the class of functions with nu-Lipschitz gradient."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from interp_lab.errors import MembershipViolation


class WitnessFunction:
    """Common interface: ``evaluate`` works on a batch of points."""

    def evaluate(self, pts) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def __call__(self, u):
        return eval_witness(self, u)


@dataclass(frozen=True)
class QuadraticWitness(WitnessFunction):
    """``c + g.(u - center) + 1/2 (u - center)^T H (u - center)``."""

    h: np.ndarray
    g: np.ndarray
    c: float = 0.0
    center: np.ndarray | None = None
    nu: float = 1.0
    kind: str = "QuadraticH"

    def evaluate(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        d = pts if self.center is None else pts - self.center
        hd = d @ self.h.T
        vals = self.c + d @ self.g + 0.5 * np.einsum("ij,ij->i", d, hd)
        return vals, hd + self.g


def half_norm(nu: float, sign: int = 1, center=None, dim: int | None = None) -> QuadraticWitness:
    """``sign * nu/2 * ||u - center||^2`` as a quadratic witness."""
    if center is not None:
        center = np.asarray(center, dtype=float)
        dim = center.shape[0]
    if dim is None:
        raise ValueError("need center or dim")
    sgn = 1.0 if sign > 0 else -1.0
    kind = "QuadraticHalfNormPos" if sgn > 0 else "QuadraticHalfNormNeg"
    return QuadraticWitness(sgn * nu * np.eye(dim), np.zeros(dim), 0.0, center, float(nu), kind)


@dataclass(frozen=True)
class PiecewiseQuadraticWitness(WitnessFunction):
    """Half-space-glued quadratic attaining the bivariate obtuse-zone bound.

    On ``d.(u - w) <= 0`` it is ``nu/2 ||u-w||^2 - nu (d.(u-w))^2 / ||d||^2``
    and on the other side ``nu/2 ||u-w||^2``; ``sign`` flips the whole
    function.
    """

    w: np.ndarray
    d: np.ndarray
    nu: float = 1.0
    sign: float = 1.0
    kind: str = "PiecewiseQuadratic"

    def evaluate(self, pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        r = pts - self.w
        dd = float(self.d @ self.d)
        s = r @ self.d
        neg = s <= 0.0
        vals = 0.5 * self.nu * np.einsum("ij,ij->i", r, r)
        vals = vals - np.where(neg, self.nu * s * s / dd, 0.0)
        grads = self.nu * r - np.where(neg, 2.0 * self.nu * s / dd, 0.0)[:, None] * self.d
        return self.sign * vals, self.sign * grads


def eval_witness(wf: WitnessFunction, u) -> tuple[float, np.ndarray]:
    vals, grads = wf.evaluate(np.asarray(u, dtype=float)[None, :])
    return float(vals[0]), grads[0]


def achieved_error(wf: WitnessFunction, inst, bary) -> float:
    """Interpolation error ``f_hat(x) - f(x) = sum_i l_i f(x_i)`` of ``wf``."""
    vals, _ = wf.evaluate(inst.points)
    return float(bary.ell @ vals)


def psi(u, v, fu, fv, gu, gv, h, nu) -> float:
    """The pairwise quantity that is nonpositive for every C^{1,1}_nu function,
    for any square matrix ``h``."""
    u, v, gu, gv = (np.asarray(a, dtype=float) for a in (u, v, gu, gv))
    h = np.asarray(h, dtype=float)
    dv = u - v
    hd = h @ dv
    return float(fu - fv
                 - (nu * dv - hd) @ gu / (2.0 * nu)
                 - (nu * dv + hd) @ gv / (2.0 * nu)
                 - hd @ hd / (4.0 * nu)
                 - nu * (dv @ dv) / 4.0)


def psi_batch(u, v, fu, fv, gu, gv, h, nu) -> np.ndarray:
    dv = u - v
    hd = dv @ np.asarray(h, dtype=float).T
    return (fu - fv
            - np.einsum("ij,ij->i", nu * dv - hd, gu) / (2.0 * nu)
            - np.einsum("ij,ij->i", nu * dv + hd, gv) / (2.0 * nu)
            - np.einsum("ij,ij->i", hd, hd) / (4.0 * nu)
            - nu * np.einsum("ij,ij->i", dv, dv) / 4.0)


def sample_pairs(lo, hi, count: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """``count`` scrambled-Halton point pairs inside the box [lo, hi]."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    n = lo.shape[0]
    sampler = qmc.Halton(d=2 * n, scramble=True, seed=rng)
    pts = sampler.random(count)
    u = lo + pts[:, :n] * (hi - lo)
    v = lo + pts[:, n:] * (hi - lo)
    return u, v


def witness_box(inst, inflate: float = 2.0) -> tuple[np.ndarray, np.ndarray]:
    """Bounding box of the sample set and query point, scaled about its center."""
    pts = inst.points
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    mid = 0.5 * (lo + hi)
    half = 0.5 * inflate * np.maximum(hi - lo, 1e-12)
    return mid - half, mid + half


@dataclass(frozen=True)
class C11Report:
    pairs: int
    max_lipschitz_ratio: float
    max_lipschitz_violation: float
    max_interp_violation: float


def check_c11(wf: WitnessFunction, nu: float, samples: int, region,
              rng: np.random.Generator | None = None, slack: float = 1e-9) -> C11Report:
    """Sampled test of gradient nu-Lipschitz continuity and of the pairwise
    interpolation inequality.

    Raises
    ------
    MembershipViolation
        On the first pair breaking either condition by more than ``slack``
        (relative to the magnitudes involved).
    """
    if samples < 2:
        raise ValueError("samples must be at least 2")
    rng = np.random.default_rng(0) if rng is None else rng
    lo, hi = region
    u, v = sample_pairs(lo, hi, samples, rng)
    fu, gu = wf.evaluate(u)
    fv, gv = wf.evaluate(v)
    dist = np.linalg.norm(u - v, axis=1)
    gdiff = np.linalg.norm(gu - gv, axis=1)
    lip_excess = gdiff - nu * dist
    lip_tol = slack * np.maximum(1.0, nu * dist)
    ratio = np.where(dist > 0, gdiff / np.where(dist > 0, dist, 1.0), 0.0)
    dv = v - u
    rhs = (fu + 0.5 * np.einsum("ij,ij->i", gu + gv, dv)
           + 0.25 * nu * np.einsum("ij,ij->i", dv, dv)
           - 0.25 / nu * gdiff ** 2)
    interp_excess = fv - rhs
    interp_tol = slack * (1.0 + np.abs(fu) + np.abs(fv) + nu * dist ** 2)
    bad = np.nonzero((lip_excess > lip_tol) | (interp_excess > interp_tol))[0]
    if bad.size:
        k = int(bad[0])
        raise MembershipViolation(
            f"pair {k} violates C^1,1 membership: gradient excess {lip_excess[k]:.3e}, "
            f"interpolation excess {interp_excess[k]:.3e}",
            pair=(u[k], v[k]), violation=float(max(lip_excess[k], interp_excess[k])),
        )
    return C11Report(samples, float(ratio.max()), float(lip_excess.max()), float(interp_excess.max()))
