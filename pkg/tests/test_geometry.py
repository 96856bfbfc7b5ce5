import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interp_lab import geometry
from interp_lab.errors import AmbiguousRegion, DegenerateSampleSet, DegenerateSwap
from interp_lab.geometry import InterpolationInstance, RegionTag
from conftest import (
    ACUTE_THETA,
    OBTUSE_THETA,
    OBTUSE_ZONES,
    UNIT_THETA,
    random_ell,
    random_instance,
    random_simplex,
    instance_from_ell,
)


def test_instance_validation():
    with pytest.raises(ValueError):
        InterpolationInstance(UNIT_THETA, [1.0], 1.0)
    with pytest.raises(ValueError):
        InterpolationInstance(UNIT_THETA, [0.0, 0.0], 0.0)
    with pytest.raises(ValueError):
        InterpolationInstance(UNIT_THETA, [np.inf, 0.0], 1.0)
    inst = InterpolationInstance(UNIT_THETA, [0.2, 0.3])
    assert inst.dim == 2 and inst.points.shape == (4, 2)


def test_barycentric_oracle(oracles):
    for case in oracles["barycentric"]:
        b = geometry.barycentric(InterpolationInstance(case["theta"], case["x"]))
        want = np.array([float(__import__("fractions").Fraction(v)) for v in case["ell"]])
        assert np.allclose(b.ell, want, atol=1e-14)


def test_barycentric_sample_point_and_midpoint():
    b = geometry.barycentric(InterpolationInstance(UNIT_THETA, [0.0, 0.0]))
    assert np.allclose(b.ell, [-1, 0, 0, 1])
    assert set(b.i_zero) == {1, 2} and b.i_plus == (3,)
    b = geometry.barycentric(InterpolationInstance(UNIT_THETA, [0.5, 0.5]))
    assert np.allclose(b.ell[1:], [0.5, 0.5, 0.0])


def test_barycentric_degenerate():
    with pytest.raises(DegenerateSampleSet):
        geometry.barycentric(InterpolationInstance([[0, 0], [1, 1], [2, 2]], [0.0, 1.0]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 10), st.integers(0, 2 ** 32 - 1))
def test_barycentric_identities(n, seed):
    rng = np.random.default_rng(seed)
    theta = random_simplex(rng, n)
    x = 3 * rng.standard_normal(n)
    b = geometry.barycentric(InterpolationInstance(theta, x))
    scale = 1 + np.max(np.abs(b.ell))
    assert b.ell[0] == -1.0
    assert abs(b.ell[1:].sum() - 1) <= 1e-10 * scale
    pts = np.vstack([x, theta])
    assert np.max(np.abs(b.ell @ pts)) <= 1e-9 * scale * (1 + np.max(np.abs(pts)))
    assert 0 in b.i_minus
    # sorted descending, ties by index
    s = b.sorted_ell
    assert np.all(np.diff(s) <= 0)


def test_sort_ties_broken_by_index():
    b = geometry.barycentric(InterpolationInstance(UNIT_THETA, [0.25, 0.25]))
    assert b.perm == (3, 1, 2)


def test_lagrange_gradients():
    grads = geometry.lagrange_gradients(InterpolationInstance(UNIT_THETA, [0.3, 0.1]))
    assert np.allclose(grads, [[1, 0], [0, 1], [-1, -1]])
    rng = np.random.default_rng(0)
    for n in (2, 4, 7):
        theta = random_simplex(rng, n)
        g = geometry.lagrange_gradients(InterpolationInstance(theta, np.zeros(n)))
        assert np.max(np.abs(g.sum(axis=0))) <= 1e-9
        # Dl_i . (x_j - x_k) = delta_ij - delta_ik
        for j in range(n + 1):
            for k in range(n + 1):
                want = np.eye(n + 1)[:, j] - np.eye(n + 1)[:, k]
                assert np.allclose(g @ (theta[j] - theta[k]), want, atol=1e-9)


def test_curvature_matches_definition():
    rng = np.random.default_rng(1)
    for n in (2, 3, 5):
        theta = random_simplex(rng, n)
        inst = InterpolationInstance(theta, 2 * rng.standard_normal(n))
        b = geometry.barycentric(inst)
        curv = geometry.curvature(inst, b)
        pts = inst.points
        direct = (pts * b.ell[:, None]).T @ pts
        assert np.allclose(curv.g, direct, atol=1e-9 * (1 + np.max(np.abs(direct))))


def test_acute_inertia_at_2_2():
    inst = InterpolationInstance(ACUTE_THETA, [2.0, 2.0])
    curv = geometry.curvature(inst, geometry.barycentric(inst))
    assert (curv.n_pos, curv.n_neg) == (1, 1)


def test_regular_simplex_reflection_spectrum():
    from interp_lab.dfo import reflection_point, regular_simplex

    for n in (2, 3, 4):
        theta = regular_simplex(np.zeros(n), 1.0)
        x = reflection_point(theta)
        inst = InterpolationInstance(theta, x)
        curv = geometry.curvature(inst, geometry.barycentric(inst))
        want = 2 * (n + 1) / n ** 2 * np.array([1.0] * (n - 1) + [-(n + 1)])
        assert np.allclose(np.sort(curv.eig.values), np.sort(want), atol=1e-10)


@settings(max_examples=80, deadline=None)
@given(st.sampled_from([2, 3, 4, 6]), st.integers(0, 2 ** 32 - 1))
def test_inertia_counts_match_sign_counts(n, seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, rng.choice(["inside", "cone", "mixed"]))
    b = geometry.barycentric(inst)
    if np.min(np.abs(b.ell[1:])) <= 1e-6:
        return
    curv = geometry.curvature(inst, b)
    assert (curv.n_pos, curv.n_neg) == (len(b.i_plus) - 1, len(b.i_minus) - 1)


def test_classify_basic_regions():
    assert geometry.classify_region(
        InterpolationInstance(UNIT_THETA, UNIT_THETA.mean(axis=0))).tag == RegionTag.INSIDE_HULL
    r = geometry.classify_region(InterpolationInstance(UNIT_THETA, [2.0, -0.5]))
    assert r.tag == RegionTag.SINGLE_CONE and r.apex == 1
    r = geometry.classify_region(InterpolationInstance(ACUTE_THETA, [2.0, 2.0]))
    assert r.tag == RegionTag.QUAD_SHARP


def test_classify_interior_points_many():
    rng = np.random.default_rng(7)
    for _ in range(5):
        theta = random_simplex(rng, 3)
        for _ in range(200):
            inst = instance_from_ell(theta, random_ell(rng, 3, "inside"))
            assert geometry.classify_region(inst).tag == RegionTag.INSIDE_HULL


@pytest.mark.parametrize("key", list(OBTUSE_ZONES))
def test_classify_obtuse_zones(key):
    tag, lab = key
    r = geometry.classify_region(InterpolationInstance(OBTUSE_THETA, OBTUSE_ZONES[key]))
    assert r.tag.value == tag and r.labeling == lab


def test_obtuse_vertices():
    assert geometry.obtuse_vertices(OBTUSE_THETA) == [1]
    assert geometry.obtuse_vertices(ACUTE_THETA) == []


def test_boundary_is_ambiguous():
    # x on the line through samples 1 and 3 beyond the hull: l_2 == 0
    with pytest.raises(AmbiguousRegion) as info:
        geometry.classify_region(InterpolationInstance(UNIT_THETA, [2.0, 0.0]))
    tags = {c.tag for c in info.value.candidates}
    assert len(tags) >= 2


def test_swap_examples_and_round_trip():
    inst = InterpolationInstance(UNIT_THETA, [1.0, 1.0])
    sw, scale = geometry.swap_instance(inst, 3)
    assert scale == pytest.approx(1.0)
    back, scale2 = geometry.swap_instance(sw, 3)
    assert np.allclose(back.theta, inst.theta, atol=1e-12) and np.allclose(back.x, inst.x, atol=1e-12)
    assert scale * scale2 == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2 ** 32 - 1))
def test_swap_round_trip_property(n, seed):
    rng = np.random.default_rng(seed)
    inst = random_instance(rng, n, "mixed")
    k = int(rng.integers(1, n + 2))
    sw, s1 = geometry.swap_instance(inst, k)
    back, s2 = geometry.swap_instance(sw, k)
    assert np.max(np.abs(back.theta - inst.theta)) <= 1e-12
    assert abs(s1 * s2 - 1) <= 1e-9


def test_swap_degenerate():
    with pytest.raises(DegenerateSwap):
        geometry.swap_instance(InterpolationInstance(UNIT_THETA, [0.5, 0.5]), 3)
