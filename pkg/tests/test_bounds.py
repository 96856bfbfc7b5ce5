from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interp_lab import bounds, eep, geometry, witness
from interp_lab.bounds import Method, Sharpness
from interp_lab.errors import HypothesisViolated, OutsideHull, ZeroLagrangeValue
from interp_lab.geometry import InterpolationInstance, RegionTag
from conftest import (
    ACUTE_THETA,
    OBTUSE_THETA,
    OBTUSE_ZONES,
    UNIT_THETA,
    random_instance,
)


def _setup(theta, x, nu=1.0):
    inst = InterpolationInstance(theta, x, nu)
    bary = geometry.barycentric(inst)
    return inst, bary, geometry.curvature(inst, bary)


def test_anchored_trivial_and_growth():
    inst, bary, _ = _setup(UNIT_THETA, UNIT_THETA[0])
    assert bounds.bound_anchored(inst, bary, UNIT_THETA[0]).value == pytest.approx(0.0, abs=1e-15)
    inst, bary, _ = _setup(ACUTE_THETA, [0.3, 0.2])
    vals = [bounds.bound_anchored(inst, bary, [r, 0.0]).value for r in (10, 20, 40)]
    assert vals[0] < vals[1] < vals[2]


def test_anchored_at_x_dominates_improved():
    inst, bary, _ = _setup(ACUTE_THETA, [0.0, 0.0])
    a = bounds.bound_anchored(inst, bary, inst.x)
    assert a.sharp == Sharpness.UPPER
    assert bounds.bound_improved(inst, bary).value <= a.value + 1e-12


def test_improved_oracle(oracles):
    for case in oracles["improved"]:
        inst, bary, _ = _setup(case["theta"], case["x"])
        assert bounds.bound_improved(inst, bary).value == pytest.approx(
            float(Fraction(case["value"])), rel=1e-13)


def test_improved_single_cone_example():
    inst, bary, _ = _setup(UNIT_THETA, [2.0, -0.5])
    rep = bounds.bound_improved(inst, bary)
    assert rep.value == pytest.approx(1.375, abs=1e-14)
    assert rep.sharp == Sharpness.PROVEN and rep.method == Method.CONE
    assert np.allclose(rep.anchor_w, UNIT_THETA[0])
    assert witness.achieved_error(rep.witness, inst, bary) == pytest.approx(1.375, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2 ** 32 - 1),
       st.lists(st.floats(-5, 5), min_size=5, max_size=5))
def test_improved_minimizes_anchored(n, seed, u):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, rng.choice(["inside", "cone", "mixed"]))
    bary = geometry.barycentric(inst)
    imp = bounds.bound_improved(inst, bary).value
    assert imp <= bounds.bound_anchored(inst, bary, np.array(u[:n])).value + 1e-12 * (1 + imp)


def test_waldron_examples():
    inst, bary, _ = _setup(UNIT_THETA, [0.5, 0.5])
    assert bounds.bound_waldron(inst, bary).value == pytest.approx(0.25)
    inst, bary, _ = _setup(UNIT_THETA, UNIT_THETA[1])
    assert bounds.bound_waldron(inst, bary).value == pytest.approx(0.0, abs=1e-15)
    inst, bary, _ = _setup(UNIT_THETA, [2.0, -0.5])
    with pytest.raises(OutsideHull):
        bounds.bound_waldron(inst, bary)


def test_quadratic_equals_waldron_inside():
    rng = np.random.default_rng(2)
    for n in (2, 3, 5):
        inst = random_instance(rng, n, "inside")
        bary = geometry.barycentric(inst)
        curv = geometry.curvature(inst, bary)
        q, _ = bounds.bound_quadratic(inst, curv)
        assert q.value == pytest.approx(bounds.bound_waldron(inst, bary).value, rel=1e-10)


def test_quadratic_regular_simplex_reflection():
    from interp_lab.dfo import reflection_point, regular_simplex

    theta = regular_simplex(np.zeros(2), 1.0)
    inst, bary, curv = _setup(theta, reflection_point(theta))
    q, h = bounds.bound_quadratic(inst, curv)
    assert q.value == pytest.approx(3.0, abs=1e-12)
    cert = bounds.certify_mu(inst, bary, curv)
    assert cert.all_nonneg
    assert np.allclose(cert.mu, 0.5, atol=1e-12)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, 4, 6]), st.integers(0, 2 ** 32 - 1))
def test_hstar_properties(n, seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, "mixed", nu=float(rng.uniform(0.5, 2)))
    bary = geometry.barycentric(inst)
    curv = geometry.curvature(inst, bary)
    q, h = bounds.bound_quadratic(inst, curv)
    assert np.allclose(h, h.T)
    assert np.allclose(h.T @ h, inst.nu ** 2 * np.eye(n), atol=1e-8 * inst.nu ** 2)
    assert 0.5 * np.sum(curv.g * h) == pytest.approx(q.value, rel=1e-10, abs=1e-12)
    assert witness.achieved_error(q.witness, inst, bary) == pytest.approx(q.value, rel=1e-9, abs=1e-9)


def test_certify_requires_nonzero_ell():
    inst, bary, curv = _setup(UNIT_THETA, [2.0, 0.0])
    with pytest.raises(ZeroLagrangeValue):
        bounds.certify_mu(inst, bary, curv)


def test_certify_single_cone_and_inside_pass():
    for x in ([2.0, -0.5], [0.2, 0.3]):
        inst, bary, curv = _setup(UNIT_THETA, x)
        assert bounds.certify_mu(inst, bary, curv).all_nonneg


def test_certify_fails_in_obtuse_zones():
    for x in OBTUSE_ZONES.values():
        inst, bary, curv = _setup(OBTUSE_THETA, x)
        cert = bounds.certify_mu(inst, bary, curv)
        assert cert.min_entry < 0 and not cert.all_nonneg


def test_mu_identities_residuals():
    rng = np.random.default_rng(11)
    for _ in range(100):
        n = int(rng.choice([2, 3, 5]))
        inst = random_instance(rng, n, "mixed")
        bary = geometry.barycentric(inst)
        cert = bounds.certify_mu(inst, bary)
        lag = bary.ell
        assert np.allclose(cert.mu.sum(axis=1), lag[list(cert.rows)], atol=1e-8)
        assert np.allclose(cert.mu.sum(axis=0), -lag[list(cert.cols)], atol=1e-8)
        assert max(cert.residuals.values()) <= 1e-7


@pytest.mark.parametrize("key", [k for k in OBTUSE_ZONES if k[0] == "BivariateTriangleZone"])
def test_obtuse_triangle_zone_bound(key):
    _, lab = key
    inst, bary, curv = _setup(OBTUSE_THETA, OBTUSE_ZONES[key])
    rep, h = bounds.bound_bivariate_obtuse(inst, bary, lab)
    q, _ = bounds.bound_quadratic(inst, curv)
    assert rep.sharp == Sharpness.PROVEN
    assert rep.value > q.value + 1e-6
    assert witness.achieved_error(rep.witness, inst, bary) == pytest.approx(rep.value, abs=1e-9)
    # the witness-value formula evaluated directly
    a, b, c = lab
    w = rep.anchor_w
    pts = inst.points
    l = bary.ell
    alt = 0.5 * inst.nu * (l[0] * np.sum((pts[0] - w) ** 2) - l[a] * np.sum((pts[a] - w) ** 2)
                           + l[b] * np.sum((pts[b] - w) ** 2) - l[c] * np.sum((pts[c] - w) ** 2))
    assert alt == pytest.approx(rep.value, abs=1e-9)
    ev = np.linalg.eigvals(h)
    assert np.allclose(np.sort(ev.real), [-1, 1])


def test_obtuse_hypothesis_violations_are_named():
    inst, bary, _ = _setup(OBTUSE_THETA, [3.0, 3.25])
    with pytest.raises(HypothesisViolated, match="l1"):
        bounds.bound_bivariate_obtuse(inst, bary, (1, 2, 3))
    inst, bary, _ = _setup(ACUTE_THETA, [2.0, 2.0])
    with pytest.raises(HypothesisViolated, match=r"\(x2-x1\)"):
        bounds.bound_bivariate_obtuse(inst, bary, (1, 2, 3))


def test_dispatcher_obtuse_cone_zone_uses_swap():
    inst, bary, _ = _setup(OBTUSE_THETA, OBTUSE_ZONES[("BivariateConeZone", (1, 2, 3))])
    rep = bounds.sharp_bound_bivariate(inst)
    assert rep.region == RegionTag.CONE_ZONE and rep.sharp == Sharpness.PROVEN
    k = int(rep.note.split()[-1])
    sw, scale = geometry.swap_instance(inst, k)
    inner = bounds.sharp_bound_bivariate(sw)
    assert rep.value == pytest.approx(abs(scale) * inner.value, rel=1e-12)
    assert witness.achieved_error(rep.witness, inst, bary) == pytest.approx(rep.value, abs=1e-9)


def test_dispatcher_vertex_and_boundary():
    rep = bounds.sharp_bound_bivariate(InterpolationInstance(ACUTE_THETA, ACUTE_THETA[2]))
    assert rep.value == pytest.approx(0.0, abs=1e-12)
    rep = bounds.sharp_bound_bivariate(InterpolationInstance(UNIT_THETA, [2.0, 0.0]))
    assert rep.sharp == Sharpness.UPPER and rep.method == Method.DISPATCHER
    # continuity across the boundary
    near = bounds.sharp_bound_bivariate(InterpolationInstance(UNIT_THETA, [2.0, 1e-6])).value
    assert rep.value == pytest.approx(near, rel=1e-4)


def test_dispatcher_rejects_other_dimensions():
    with pytest.raises(HypothesisViolated):
        bounds.sharp_bound_bivariate(InterpolationInstance(np.eye(4)[:, :3], [2.0, 2.0, 2.0]))


def test_gradient_bound():
    rng = np.random.default_rng(9)
    for _ in range(50):
        n = int(rng.integers(2, 6))
        inst = random_instance(rng, n, rng.choice(["inside", "cone", "mixed"]))
        bary = geometry.barycentric(inst)
        val = bounds.bound_gradient(inst, bary)
        # f = nu/2 ||u||^2: interpolant gradient from the affine fit
        f = 0.5 * inst.nu * np.sum(inst.theta ** 2, axis=1)
        grads = geometry.lagrange_gradients(inst)
        err = np.linalg.norm(grads.T @ f - inst.nu * inst.x)
        assert err <= val + 1e-9 * (1 + val)


def test_gradient_bound_at_sample_point():
    inst, bary, _ = _setup(UNIT_THETA, UNIT_THETA[2])
    grads = geometry.lagrange_gradients(inst)
    d2 = np.sum((UNIT_THETA - UNIT_THETA[2]) ** 2, axis=1)
    want = 0.5 * np.linalg.norm(grads, axis=1) @ d2
    assert bounds.bound_gradient(inst, bary) == pytest.approx(want)


def test_ordering_chain_against_eep():
    rng = np.random.default_rng(21)
    for _ in range(15):
        n = int(rng.choice([2, 3]))
        inst = random_instance(rng, n, rng.choice(["inside", "cone", "mixed"]))
        bary = geometry.barycentric(inst)
        q, _ = bounds.bound_quadratic(inst, geometry.curvature(inst, bary))
        e = eep.sharp_bound(inst)
        imp = bounds.bound_improved(inst, bary).value
        assert q.value <= e + 1e-6 * (1 + e)
        assert e <= imp + 1e-6 * (1 + e)
