"""Barycentric coordinates, the curvature matrix G and region classification.

Indexing convention used throughout the package: index 0 is the query point
``x`` (with artificial Lagrange value -1) and indices 1..n+1 are the sample
points in the order they were given.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from interp_lab import linalg
from interp_lab.errors import (
    AmbiguousRegion,
    DegenerateSampleSet,
    DegenerateSwap,
    SingularMatrix,
)


@dataclass(frozen=True)
class InterpolationInstance:
    """Sample set ``theta`` (n+1 rows in R^n), query point ``x`` and the
    Lipschitz constant ``nu`` of the gradient."""

    theta: np.ndarray
    x: np.ndarray
    nu: float = 1.0

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float)
        x = np.array(self.x, dtype=float).reshape(-1)
        if theta.ndim != 2 or theta.shape[0] != theta.shape[1] + 1:
            raise ValueError(f"theta must have shape (n+1, n), got {theta.shape}")
        if x.shape[0] != theta.shape[1]:
            raise ValueError("x must have the same dimension as the sample points")
        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(x))):
            raise ValueError("coordinates must be finite")
        if not (np.isfinite(self.nu) and self.nu > 0):
            raise ValueError("nu must be a positive finite number")
        theta.setflags(write=False)
        x.setflags(write=False)
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "nu", float(self.nu))

    @property
    def dim(self) -> int:
        return self.x.shape[0]

    @property
    def points(self) -> np.ndarray:
        """All n+2 points, query point first."""
        return np.vstack([self.x, self.theta])

    def with_x(self, x) -> "InterpolationInstance":
        return InterpolationInstance(self.theta, x, self.nu)


@dataclass(frozen=True)
class BarycentricData:
    ell: np.ndarray
    perm: tuple
    i_plus: tuple
    i_minus: tuple
    i_zero: tuple
    tol: float
    y: np.ndarray = field(repr=False)

    @property
    def sorted_ell(self) -> np.ndarray:
        return self.ell[list(self.perm)]


@dataclass(frozen=True)
class CurvatureSpectrum:
    g: np.ndarray
    eig: linalg.EigenDecomposition
    n_pos: int
    n_neg: int
    n_zero: int


class RegionTag(str, enum.Enum):
    INSIDE_HULL = "InsideHull"
    SINGLE_CONE = "SingleCone"
    QUAD_SHARP = "QuadSharpZone"
    TRIANGLE_ZONE = "BivariateTriangleZone"
    CONE_ZONE = "BivariateConeZone"
    UNRESOLVED = "Unresolved"


@dataclass(frozen=True)
class RegionClass:
    tag: RegionTag
    apex: int | None = None
    # sample indices (a, b, c) playing the roles 1, 2, 3 of the canonical
    # obtuse configuration: obtuse angle at a
    labeling: tuple | None = None


def zero_tolerance(ell) -> float:
    return 1e-9 * (1.0 + float(np.max(np.abs(ell))))


def barycentric(inst: InterpolationInstance) -> BarycentricData:
    """Lagrange polynomial values of ``inst.x`` with respect to ``inst.theta``.

    Solves ``Phi^T l = (1, 0, ..., 0)`` with ``Phi = [1  Y]`` and rows of
    ``Y`` equal to ``x_i - x``.
    """
    y = inst.theta - inst.x
    phi = np.hstack([np.ones((inst.dim + 1, 1)), y])
    rhs = np.zeros(inst.dim + 1)
    rhs[0] = 1.0
    try:
        lag = linalg.solve(phi.T, rhs)
    except SingularMatrix as exc:
        raise DegenerateSampleSet("sample set is affinely dependent") from exc
    ell = np.concatenate([[-1.0], lag])
    tol = zero_tolerance(lag)
    order = sorted(range(1, inst.dim + 2), key=lambda i: (-ell[i], i))
    plus = tuple(i for i in order if ell[i] > tol)
    minus = (0,) + tuple(i for i in order if ell[i] < -tol)
    zero = tuple(i for i in order if abs(ell[i]) <= tol)
    ell.setflags(write=False)
    y.setflags(write=False)
    return BarycentricData(ell, tuple(order), plus, minus, zero, tol, y)


def lagrange_gradients(inst: InterpolationInstance) -> np.ndarray:
    """Constant gradients of the affine Lagrange polynomials, one per row."""
    y = inst.theta - inst.x
    a = np.hstack([np.ones((inst.dim + 1, 1)), y])
    try:
        coeffs = linalg.inverse(a)
    except SingularMatrix as exc:
        raise DegenerateSampleSet("sample set is affinely dependent") from exc
    return coeffs[1:, :].T.copy()


def curvature(inst: InterpolationInstance, bary: BarycentricData) -> CurvatureSpectrum:
    """G = sum_i l_i x_i x_i^T, built in the recentred form Y^T diag(l) Y."""
    lag = bary.ell[1:]
    y = bary.y
    g = (y * lag[:, None]).T @ y
    g = 0.5 * (g + g.T)
    eig = linalg.sym_eigen(g)
    pos, neg, zero = linalg.inertia(eig.values, linalg.norm_inf(g))
    return CurvatureSpectrum(g, eig, pos, neg, zero)


def obtuse_vertices(theta) -> list[int]:
    """Sample indices (1-based) with an obtuse angle (x_j - x_i).(x_k - x_i) < 0."""
    theta = np.asarray(theta, dtype=float)
    m = theta.shape[0]
    out = []
    for i in range(m):
        for j, k in itertools.combinations([t for t in range(m) if t != i], 2):
            d = (theta[j] - theta[i]) @ (theta[k] - theta[i])
            scale = np.linalg.norm(theta[j] - theta[i]) * np.linalg.norm(theta[k] - theta[i])
            if d < -1e-12 * scale:
                out.append(i + 1)
                break
    return out


def zone_expression(inst: InterpolationInstance, bary: BarycentricData, labeling) -> float:
    """l_a [x_b-x_a].[x_c-x_a] - l_c [x_b-x_c].[x_a-x_c] for roles (a, b, c)."""
    a, b, c = labeling
    xa, xb, xc = (inst.theta[i - 1] for i in labeling)
    return float(bary.ell[a] * (xb - xa) @ (xc - xa) - bary.ell[c] * (xb - xc) @ (xa - xc))


def _zone_scale(inst, bary) -> float:
    diam2 = float(np.max(np.sum((inst.theta[:, None, :] - inst.theta[None, :, :]) ** 2, axis=-1)))
    return 1e-9 * (1.0 + float(np.max(np.abs(bary.ell))) * diam2)


def _sign(v: float, tol: float) -> int:
    return 1 if v > tol else (-1 if v < -tol else 0)


def _decide(ell_sign, zone_sign, obtuse, n) -> RegionClass:
    positives = [i for i, s in ell_sign.items() if s > 0]
    if all(s > 0 for s in ell_sign.values()):
        return RegionClass(RegionTag.INSIDE_HULL)
    if len(positives) == 1:
        return RegionClass(RegionTag.SINGLE_CONE, apex=positives[0])
    if n == 2 and obtuse is not None:
        a = obtuse
        b, c = [i for i in (1, 2, 3) if i != a]
        for lab in ((a, b, c), (a, c, b)):
            _, lb, lc = lab
            e = zone_sign[lab]
            if ell_sign[lb] > 0 and ell_sign[lc] < 0 and e < 0:
                return RegionClass(RegionTag.TRIANGLE_ZONE, labeling=lab)
            if ell_sign[lc] > 0 and e > 0:
                return RegionClass(RegionTag.CONE_ZONE, labeling=lab)
    return RegionClass(RegionTag.QUAD_SHARP)


def classify_region(inst: InterpolationInstance, bary: BarycentricData | None = None,
                    spectrum: CurvatureSpectrum | None = None) -> RegionClass:
    """Decide which closed-form bound applies at ``inst.x``.

    Quantities within tolerance of zero are resolved both ways; if the
    outcomes differ an ``AmbiguousRegion`` carrying every candidate tag is
    raised instead of guessing.  For configurations covered by none of the
    explicit zones the mu certificate decides between ``QuadSharpZone`` and
    ``Unresolved``.
    """
    if bary is None:
        bary = barycentric(inst)
    n = inst.dim
    tol = bary.tol
    lag = bary.ell
    if np.all(lag[1:] >= -tol):
        return RegionClass(RegionTag.INSIDE_HULL)

    ell_vals = {i: _sign(lag[i], tol) for i in range(1, n + 2)}
    obtuse = None
    zone_vals = {}
    if n == 2:
        obt = obtuse_vertices(inst.theta)
        if obt:
            obtuse = obt[0]
            b, c = [i for i in (1, 2, 3) if i != obtuse]
            ztol = _zone_scale(inst, bary)
            for lab in ((obtuse, b, c), (obtuse, c, b)):
                zone_vals[lab] = _sign(zone_expression(inst, bary, lab), ztol)

    uncertain = [("l", k) for k, s in ell_vals.items() if s == 0]
    uncertain += [("z", k) for k, s in zone_vals.items() if s == 0]
    outcomes = []
    for choice in itertools.product((1, -1), repeat=len(uncertain)):
        es, zs = dict(ell_vals), dict(zone_vals)
        for (kind, key), s in zip(uncertain, choice):
            (es if kind == "l" else zs)[key] = s
        outcomes.append(_decide(es, zs, obtuse, n))
    distinct = list(dict.fromkeys(outcomes))
    if len(distinct) > 1 or (bary.i_zero and distinct[0].tag == RegionTag.QUAD_SHARP):
        cands = [RegionTag.UNRESOLVED if r.tag == RegionTag.QUAD_SHARP and bary.i_zero else r.tag
                 for r in distinct]
        raise AmbiguousRegion(
            "query point lies on a region boundary (a deciding quantity is within tolerance of zero)",
            candidates=[RegionClass(t, r.apex, r.labeling) for t, r in zip(cands, distinct)],
        )
    region = distinct[0]
    if region.tag != RegionTag.QUAD_SHARP:
        return region
    from interp_lab.bounds import certify_mu

    if spectrum is None:
        spectrum = curvature(inst, bary)
    cert = certify_mu(inst, bary, spectrum)
    return region if cert.all_nonneg else RegionClass(RegionTag.UNRESOLVED)


def swap_instance(inst: InterpolationInstance, k: int,
                  bary: BarycentricData | None = None) -> tuple[InterpolationInstance, float]:
    """Exchange the query point with sample ``k`` (1-based).

    Returns the swapped instance and ``scale = -l_k(x)``; the interpolation
    error at ``x`` equals ``scale`` times the error of the swapped
    interpolant at ``x_k`` for every function.
    """
    if not 1 <= k <= inst.dim + 1:
        raise ValueError(f"sample index {k} out of range 1..{inst.dim + 1}")
    if bary is None:
        bary = barycentric(inst)
    lk = float(bary.ell[k])
    if abs(lk) <= bary.tol:
        raise DegenerateSwap(f"l_{k}(x) is zero; swapped set would be affinely dependent")
    theta = np.array(inst.theta)
    new_x = theta[k - 1].copy()
    theta[k - 1] = inst.x
    swapped = InterpolationInstance(theta, new_x, inst.nu)
    try:
        barycentric(swapped)
    except DegenerateSampleSet as exc:
        raise DegenerateSwap("swapped sample set is affinely dependent") from exc
    return swapped, -lk
