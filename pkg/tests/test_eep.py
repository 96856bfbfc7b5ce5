import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interp_lab import bounds, eep, geometry
from interp_lab.errors import DegenerateSampleSet
from interp_lab.geometry import InterpolationInstance
from conftest import ACUTE_THETA, UNIT_THETA, random_instance


def test_build_counts():
    prob = eep.build(InterpolationInstance(UNIT_THETA, [2.0, -0.5]))
    assert prob.n_raw == 12 and prob.n_vars == 9 and prob.n_constraints == 12
    assert prob.dist2.shape == (12,)


def test_build_degenerate():
    with pytest.raises(DegenerateSampleSet):
        eep.build(InterpolationInstance([[0, 0], [1, 1], [2, 2]], [0.0, 1.0]))


def test_zero_start_slacks(kern):
    inst = InterpolationInstance(ACUTE_THETA, [2.0, 2.0])
    pts = inst.points
    p = pts.shape[0]
    c = kern.pair_slacks(pts, np.zeros(p), np.zeros((p, 2)), 1.0)
    prob = eep.build(inst)
    assert np.allclose(c, prob.dist2 / 4)
    assert np.all(c > 0)


def test_oracle_values(backend, oracles):
    for case in oracles["eep"]:
        inst = InterpolationInstance(case["theta"], case["x"], case["nu"])
        sol = eep.solve(eep.build(inst), 1e-8)
        assert sol.objective == pytest.approx(case["value"], abs=1e-6)
        assert sol.max_constraint_violation <= 1e-8


def test_thm_cone_example_and_sample_point():
    sol = eep.solve(eep.build(InterpolationInstance(UNIT_THETA, [2.0, -0.5])), 1e-6)
    assert sol.objective == pytest.approx(1.375, abs=1e-5)
    assert np.isfinite(sol.kkt_residual) and sol.iterations <= 500
    assert eep.sharp_bound(InterpolationInstance(UNIT_THETA, UNIT_THETA[1])) == pytest.approx(0.0, abs=1e-6)


def test_regular_simplex_reflection():
    from interp_lab.dfo import reflection_point, regular_simplex

    theta = regular_simplex(np.zeros(2), 1.0)
    val = eep.sharp_bound(InterpolationInstance(theta, reflection_point(theta)))
    assert val == pytest.approx(3.0, abs=1e-5)


def test_gauge_invariance():
    rng = np.random.default_rng(3)
    for _ in range(5):
        inst = random_instance(rng, 2, "mixed")
        a = eep.solve(eep.build(inst), 1e-6).objective
        vals = tuple(rng.standard_normal(3))
        b = eep.solve(eep.build(inst, eep.FixSampleValues(vals)), 1e-6).objective
        z = eep.solve(eep.build(inst, eep.FixSampleValues((0.0, 0.0, 0.0))), 1e-6).objective
        assert abs(a - b) <= 2e-6 * (1 + abs(a))
        assert abs(a - z) <= 2e-6 * (1 + abs(a))


def test_nu_scaling():
    rng = np.random.default_rng(5)
    theta = rng.standard_normal((3, 2))
    x = 2 * rng.standard_normal(2)
    vals = {nu: eep.solve(eep.build(InterpolationInstance(theta, x, nu)), 1e-9).objective
            for nu in (0.5, 1.0, 2.0)}
    assert vals[0.5] / vals[1.0] == pytest.approx(0.5, rel=1e-6)
    assert vals[2.0] / vals[1.0] == pytest.approx(2.0, rel=1e-6)


def test_tolerance_validated():
    prob = eep.build(InterpolationInstance(UNIT_THETA, [2.0, -0.5]))
    with pytest.raises(ValueError):
        eep.solve(prob, 0.1)
    with pytest.raises(ValueError):
        eep.solve(prob, 0.0)


def test_solution_fields_are_consistent():
    inst = InterpolationInstance(ACUTE_THETA, [-2.0, 1.0], 1.7)
    prob = eep.build(inst)
    sol = eep.solve(prob, 1e-7)
    bary = geometry.barycentric(inst)
    assert sol.objective == pytest.approx(bary.ell @ sol.y, rel=1e-12)
    assert sol.y[0] == 0.0 and np.all(sol.g[0] == 0.0)
    assert eep.check_solution(prob, sol.y, sol.g) >= -1e-8
    assert sol.barrier_mu_final * prob.n_constraints * 1.7 * prob.length ** 2 <= 1e-7 * (1 + sol.objective)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from([2, 3, 5]), st.integers(0, 2 ** 32 - 1))
def test_bracketed_by_analytic_bounds(n, seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, rng.choice(["inside", "cone", "mixed"]))
    bary = geometry.barycentric(inst)
    e = eep.sharp_bound(inst)
    q, _ = bounds.bound_quadratic(inst, geometry.curvature(inst, bary))
    assert q.value - 1e-6 * (1 + e) <= e <= bounds.bound_improved(inst, bary).value + 1e-6 * (1 + e)


def test_swap_identity_small():
    rng = np.random.default_rng(8)
    for _ in range(5):
        inst = random_instance(rng, 2, "mixed")
        k = int(rng.integers(1, 4))
        sw, scale = geometry.swap_instance(inst, k)
        a = eep.sharp_bound(inst, 1e-8)
        b = eep.sharp_bound(sw, 1e-8)
        assert a == pytest.approx(abs(scale) * b, rel=1e-4)
