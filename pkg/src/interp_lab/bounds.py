"""Analytical error bounds for linear interpolation of C^{1,1}_nu functions,
the mu sharpness certificate and the bivariate sharp-bound dispatcher."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from interp_lab import geometry, linalg
from interp_lab.errors import (
    AmbiguousRegion,
    HypothesisViolated,
    InterpLabError,
    NumericalBreakdown,
    OutsideHull,
    SingularMatrix,
    SingularPartition,
    ZeroLagrangeValue,
)
from interp_lab.geometry import (
    BarycentricData,
    CurvatureSpectrum,
    InterpolationInstance,
    RegionClass,
    RegionTag,
)
from interp_lab.witness import (
    PiecewiseQuadraticWitness,
    QuadraticWitness,
    WitnessFunction,
    half_norm,
)


class Method(str, enum.Enum):
    ANCHORED = "AnchoredTaylor"
    WALDRON = "WaldronHull"
    CONE = "ConeSharp"
    QUADRATIC = "QuadraticEigen"
    OBTUSE = "BivariateObtuse"
    DISPATCHER = "Dispatcher"


class Sharpness(str, enum.Enum):
    PROVEN = "ProvenSharp"
    UPPER = "UpperOnly"
    LOWER = "LowerOnly"


@dataclass(frozen=True)
class BoundReport:
    value: float
    method: Method
    sharp: Sharpness
    witness: WitnessFunction | None = None
    anchor_w: np.ndarray | None = None
    region: RegionTag | None = None
    note: str = ""

    def __post_init__(self):
        if not self.value >= 0.0:
            if self.value > -1e-12 * (1.0 + abs(self.value)):
                object.__setattr__(self, "value", 0.0)
            else:
                raise NumericalBreakdown(f"negative bound value {self.value!r}")


@dataclass(frozen=True)
class MuCertificate:
    """Rows follow ``rows`` (the I+ indices), columns follow ``cols`` (0 first,
    then the remaining I- indices)."""

    mu: np.ndarray
    rows: tuple
    cols: tuple
    all_nonneg: bool
    min_entry: float
    residuals: dict = field(default_factory=dict)



def bound_anchored(inst: InterpolationInstance, bary: BarycentricData, u) -> BoundReport:
    """Taylor bound anchored at an arbitrary point ``u``:
    (nu/2)(||x-u||^2 + sum_i |l_i| ||x_i-u||^2)."""
    u = np.asarray(u, dtype=float)
    d0 = inst.x - u
    d = inst.theta - u
    val = 0.5 * inst.nu * (d0 @ d0 + np.abs(bary.ell[1:]) @ np.einsum("ij,ij->i", d, d))
    return BoundReport(float(val), Method.ANCHORED, Sharpness.UPPER, anchor_w=u)


def improved_anchor(inst, bary) -> np.ndarray:
    a = np.abs(bary.ell[1:])
    # recentred at x to avoid cancellation
    return inst.x + (a @ bary.y) / (1.0 + a.sum())


def bound_improved(inst: InterpolationInstance, bary: BarycentricData) -> BoundReport:
    """Anchored bound at its minimizing anchor w.

    Sharp inside the hull (equal to the Waldron bound) and when exactly one
    Lagrange value is positive, where ``-nu/2 ||u - w||^2`` attains it.
    """
    w = improved_anchor(inst, bary)
    d0 = inst.x - w
    d = inst.theta - w
    val = float(0.5 * inst.nu * (d0 @ d0 + np.abs(bary.ell[1:]) @ np.einsum("ij,ij->i", d, d)))
    tol = bary.tol
    lag = bary.ell[1:]
    if np.all(lag >= -tol):
        return BoundReport(val, Method.WALDRON, Sharpness.PROVEN,
                           half_norm(inst.nu, +1, inst.x), w, RegionTag.INSIDE_HULL)
    if np.sum(lag > tol) == 1 and not bary.i_zero:
        return BoundReport(val, Method.CONE, Sharpness.PROVEN,
                           half_norm(inst.nu, -1, w), w, RegionTag.SINGLE_CONE)
    return BoundReport(val, Method.ANCHORED, Sharpness.UPPER, anchor_w=w)


def bound_waldron(inst: InterpolationInstance, bary: BarycentricData) -> BoundReport:
    """(nu/2)(sum_i l_i ||x_i||^2 - ||x||^2), valid for x in the hull."""
    if np.any(bary.ell[1:] < -bary.tol):
        raise OutsideHull("query point lies outside the convex hull of the samples")
    val = 0.5 * inst.nu * float(bary.ell[1:] @ np.einsum("ij,ij->i", bary.y, bary.y))
    return BoundReport(max(val, 0.0), Method.WALDRON, Sharpness.PROVEN,
                       half_norm(inst.nu, +1, inst.x), inst.x.copy(), RegionTag.INSIDE_HULL)


def hstar_symmetric(spectrum: CurvatureSpectrum, nu: float) -> np.ndarray:
    """nu P sign(Lambda) P^T with sign(0) = 0 under the inertia threshold."""
    vals = spectrum.eig.values
    tau = 1e-9 * max(1.0, linalg.norm_inf(spectrum.g))
    sgn = np.where(vals > tau, 1.0, np.where(vals < -tau, -1.0, 0.0))
    p = spectrum.eig.vectors
    h = nu * (p * sgn) @ p.T
    return 0.5 * (h + h.T)


def bound_quadratic(inst: InterpolationInstance,
                    spectrum: CurvatureSpectrum) -> tuple[BoundReport, np.ndarray]:
    """Largest error attainable by a quadratic in the class: (nu/2) sum |lambda(G)|.

    Always a lower bound on the sharp value (its witness is attached); call
    ``certify_mu`` to upgrade it.
    """
    h = hstar_symmetric(spectrum, inst.nu)
    val = 0.5 * inst.nu * float(np.sum(np.abs(spectrum.eig.values)))
    wf = QuadraticWitness(h, np.zeros(inst.dim), 0.0, inst.x.copy(), inst.nu)
    return BoundReport(val, Method.QUADRATIC, Sharpness.LOWER, wf), h


def certify_mu(inst: InterpolationInstance, bary: BarycentricData,
               spectrum: CurvatureSpectrum | None = None) -> MuCertificate:
    """Pairing weights mu_ij whose nonnegativity certifies the quadratic bound.

    Raises
    ------
    ZeroLagrangeValue
        If some Lagrange value is within tolerance of zero.
    SingularPartition
        If ``Y_- P_-`` is numerically singular.
    NumericalBreakdown
        If the zeroth- or first-order identities fail their tolerances.
    """
    if bary.i_zero:
        raise ZeroLagrangeValue(f"Lagrange values at indices {list(bary.i_zero)} are zero")
    if spectrum is None:
        spectrum = geometry.curvature(inst, bary)
    rows = bary.i_plus
    neg = bary.i_minus[1:]
    lag = bary.ell
    lp = lag[list(rows)]
    yp = bary.y[[i - 1 for i in rows]]
    k = len(neg)
    mu = np.zeros((len(rows), k + 1))
    if k:
        ym = bary.y[[j - 1 for j in neg]]
        pm = spectrum.eig.vectors[:, inst.dim - k:]
        z = ym @ pm
        rhs = (yp * lp[:, None]) @ pm
        try:
            if linalg.cond_inf(z) > 1e12:
                raise SingularMatrix("ill-conditioned")
            m = linalg.solve(z.T, rhs.T).T
        except SingularMatrix as exc:
            raise SingularPartition("Y_- P_- is numerically singular") from exc
        mu[:, 1:] = m
    mu[:, 0] = lp - mu[:, 1:].sum(axis=1)

    cols = (0,) + tuple(neg)
    lm = lag[list(cols)]
    scale = 1.0 + float(np.max(np.abs(lag)))
    row_res = float(np.max(np.abs(mu.sum(axis=1) - lp)))
    col_res = float(np.max(np.abs(mu.sum(axis=0) + lm)))
    if max(row_res, col_res) > 1e-8 * scale:
        raise NumericalBreakdown(f"mu sum identities violated ({row_res:.2e}, {col_res:.2e})")

    nu = inst.nu
    h = hstar_symmetric(spectrum, nu)
    eye = np.eye(inst.dim)
    ypts = np.vstack([np.zeros(inst.dim), bary.y])  # row 0 is x itself
    ym_all = ypts[list(cols)]
    first_plus = (mu @ ym_all - lp[:, None] * yp) @ (nu * eye - h).T
    first_minus = (mu.T @ yp + lm[:, None] * ym_all) @ (nu * eye + h).T
    fscale = scale * nu * (1.0 + float(np.max(np.abs(bary.y))))
    fo_res = float(max(np.max(np.abs(first_plus)), np.max(np.abs(first_minus))))
    if fo_res > 1e-7 * fscale:
        raise NumericalBreakdown(f"mu first-order identities violated ({fo_res:.2e})")

    min_entry = float(mu.min())
    ok = min_entry >= -1e-9 * (1.0 + float(np.max(np.abs(mu))))
    residuals = {"row_sum": row_res, "col_sum": col_res, "first_order": fo_res}
    return MuCertificate(mu, tuple(rows), cols, bool(ok), min_entry, residuals)


def _obtuse_check(inst, bary, labeling, strict):
    a, b, c = labeling
    xa, xb, xc = (inst.theta[i - 1] for i in labeling)
    tol = bary.tol if strict else -bary.tol
    failed = []
    if not (xb - xa) @ (xc - xa) < 0:
        failed.append("(x2-x1).(x3-x1) < 0")
    if not bary.ell[b] > tol:
        failed.append("l2 > 0")
    if not bary.ell[c] < -tol:
        failed.append("l3 < 0")
    ztol = geometry._zone_scale(inst, bary)
    if not geometry.zone_expression(inst, bary, labeling) < (-ztol if strict else ztol):
        failed.append("l1 (x2-x1).(x3-x1) - l3 (x2-x3).(x1-x3) < 0")
    return failed


def bound_bivariate_obtuse(inst: InterpolationInstance, bary: BarycentricData, labeling,
                           strict: bool = True) -> tuple[BoundReport, np.ndarray]:
    """Sharp bound G.H*/2 for the bivariate obtuse triangle zone.

    ``labeling`` gives the sample indices (a, b, c) taking the roles 1, 2, 3:
    obtuse angle at a, l_b > 0, l_c < 0.  ``H* = P diag(nu, -nu) P^{-1}`` with
    ``P = [x_b - x | x_a - x_c]`` is not symmetric.

    Raises
    ------
    HypothesisViolated
        Naming every failed hypothesis.  With ``strict=False`` the sign
        conditions are allowed to touch zero (used on region boundaries).
    """
    if inst.dim != 2:
        raise HypothesisViolated("bivariate obtuse bound requires n == 2")
    labeling = tuple(int(i) for i in labeling)
    if sorted(labeling) != [1, 2, 3]:
        raise ValueError(f"labeling must be a permutation of (1, 2, 3), got {labeling}")
    failed = _obtuse_check(inst, bary, labeling, strict)
    if failed:
        raise HypothesisViolated("failed hypotheses: " + "; ".join(failed))
    a, b, c = labeling
    la, lb, lc = bary.ell[a], bary.ell[b], bary.ell[c]
    ya, yb, yc = (bary.y[i - 1] for i in labeling)
    nu = inst.nu
    p = np.column_stack([yb, ya - yc])
    try:
        hstar = p @ np.diag([nu, -nu]) @ linalg.inverse(p)
    except SingularMatrix as exc:
        raise HypothesisViolated("P = [x2 - x | x1 - x3] is singular") from exc
    curv = geometry.curvature(inst, bary)
    val = 0.5 * float(np.sum(curv.g * hstar))

    # w on the line x1-x3, computed relative to x
    wy = (la * ya + lc * yc) / (la + lc)
    w = inst.x + wy
    scale = 1.0 + float(np.max(np.abs(bary.ell))) * (1.0 + float(np.max(np.abs(bary.y))))
    res_a = -1.0 * (0.0 - wy) + lb * (yb - wy)
    res_b = la * (ya - wy) + lc * (yc - wy)
    if max(np.max(np.abs(res_a)), np.max(np.abs(res_b))) > 1e-9 * scale:
        raise NumericalBreakdown("w fails its defining identities")
    for yi, sgn in ((np.zeros(2) - wy, 1.0), (yb - wy, 1.0), (ya - wy, -1.0), (yc - wy, -1.0)):
        if np.max(np.abs(hstar @ yi - sgn * nu * yi)) > 1e-9 * nu * scale:
            raise NumericalBreakdown("H* eigen-action identities fail")
    wf = PiecewiseQuadraticWitness(w, inst.theta[a - 1] - inst.theta[c - 1], nu)
    return (BoundReport(val, Method.OBTUSE, Sharpness.PROVEN, wf, w, RegionTag.TRIANGLE_ZONE),
            hstar)


def bound_gradient(inst: InterpolationInstance, bary: BarycentricData) -> float:
    """Upper bound on ||D f_hat(x) - D f(x)||: (nu/2) sum_i ||D l_i|| ||x_i - x||^2.

    Not tight in general.
    """
    grads = geometry.lagrange_gradients(inst)
    return float(0.5 * inst.nu * np.linalg.norm(grads, axis=1) @ np.einsum("ij,ij->i", bary.y, bary.y))


def _swap_reduction(inst, bary) -> BoundReport:
    """Cone zone: exchange x with the sample whose swap image lands in the
    triangle zone, then rescale by |l_k|."""
    matches = []
    for k in (1, 2, 3):
        if abs(bary.ell[k]) <= bary.tol:
            continue
        swapped, scale = geometry.swap_instance(inst, k, bary)
        sbary = geometry.barycentric(swapped)
        try:
            reg = geometry.classify_region(swapped, sbary)
        except AmbiguousRegion:
            continue
        if reg.tag == RegionTag.TRIANGLE_ZONE:
            matches.append((k, swapped, sbary, scale, reg))
    if not matches:
        raise AmbiguousRegion("no swap image lies in the triangle zone",
                              candidates=[RegionClass(RegionTag.CONE_ZONE)])
    # several swaps can qualify; the swap identity makes their values equal,
    # so agreement is checked and the lowest sample index is reported
    reps = []
    for k, swapped, sbary, scale, reg in matches:
        rep, _ = bound_bivariate_obtuse(swapped, sbary, reg.labeling)
        reps.append((k, scale, rep))
    vals = [abs(scale) * rep.value for _, scale, rep in reps]
    if max(vals) - min(vals) > 1e-8 * (1.0 + max(vals)):
        raise AmbiguousRegion(
            f"cone-zone swaps disagree ({min(vals):.6g} vs {max(vals):.6g})",
            candidates=[RegionClass(RegionTag.CONE_ZONE)],
        )
    k, scale, rep = reps[0]
    wf = rep.witness
    # error at x = scale * (error of the swapped interpolant at x_k)
    signed = PiecewiseQuadraticWitness(wf.w, wf.d, wf.nu, float(np.sign(scale)))
    return BoundReport(vals[0], Method.OBTUSE, Sharpness.PROVEN, signed, wf.w,
                       RegionTag.CONE_ZONE, note=f"swapped with sample {k}")


def _unresolved(inst, tol) -> BoundReport:
    from interp_lab import eep

    sol = eep.solve(eep.build(inst), tol)
    return BoundReport(max(sol.objective, 0.0), Method.DISPATCHER, Sharpness.UPPER,
                       region=RegionTag.UNRESOLVED, note="numeric EEP value")


def bound_for_region(inst, bary, region: RegionClass, eep_tol: float = 1e-6,
                     strict: bool = True) -> BoundReport:
    """Bound matched to a known region (``strict=False`` on boundaries)."""
    tag = region.tag
    if tag == RegionTag.INSIDE_HULL:
        return bound_waldron(inst, bary)
    if tag == RegionTag.SINGLE_CONE:
        rep = bound_improved(inst, bary)
        if rep.witness is None:
            w = rep.anchor_w
            rep = BoundReport(rep.value, Method.CONE, rep.sharp, half_norm(inst.nu, -1, w), w,
                              RegionTag.SINGLE_CONE)
        return rep
    if tag == RegionTag.QUAD_SHARP:
        rep, _ = bound_quadratic(inst, geometry.curvature(inst, bary))
        return BoundReport(rep.value, Method.QUADRATIC, Sharpness.PROVEN, rep.witness,
                           region=RegionTag.QUAD_SHARP)
    if tag == RegionTag.TRIANGLE_ZONE:
        rep, _ = bound_bivariate_obtuse(inst, bary, region.labeling, strict=strict)
        return rep
    if tag == RegionTag.CONE_ZONE:
        return _swap_reduction(inst, bary)
    return _unresolved(inst, eep_tol)


def sharp_bound_bivariate(inst: InterpolationInstance, eep_tol: float = 1e-6) -> BoundReport:
    """Dispatch to the sharp closed-form bound for the region containing x.

    On a region boundary every candidate bound is evaluated and the largest
    is returned marked ``UpperOnly``.  Configurations without a closed form
    fall back to the numerical EEP value (method ``Dispatcher``).
    """
    if inst.dim != 2:
        raise HypothesisViolated("the bivariate dispatcher requires n == 2")
    bary = geometry.barycentric(inst)
    try:
        region = geometry.classify_region(inst, bary)
    except AmbiguousRegion as amb:
        return _boundary_bound(inst, bary, amb.candidates, eep_tol)
    try:
        return bound_for_region(inst, bary, region, eep_tol)
    except AmbiguousRegion as amb:
        return _boundary_bound(inst, bary, amb.candidates, eep_tol)


def _boundary_bound(inst, bary, candidates, eep_tol) -> BoundReport:
    best = None
    for cand in candidates:
        try:
            rep = bound_for_region(inst, bary, cand, eep_tol, strict=False)
        except (InterpLabError, ValueError):
            rep = _unresolved(inst, eep_tol)
        if best is None or rep.value > best.value:
            best = rep
    if best is None:
        best = _unresolved(inst, eep_tol)
    wf = best.witness
    if wf is None:
        wf = half_norm(inst.nu, +1, inst.x)
    return BoundReport(best.value, Method.DISPATCHER, Sharpness.UPPER, wf, best.anchor_w,
                       best.region, note="region boundary: max over adjacent bounds")
