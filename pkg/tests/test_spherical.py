from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realizer.common.errors import PreconditionError
from realizer.common.runtime import make_rng
from realizer.geometry.spherical import (
    ALPHA,
    BoundarySphere,
    SphereCap,
    boundary_intersection,
    cap_area,
    cap_fraction_bound,
    cap_ratio_bounds,
    full_area,
    log_cap_area,
    sample_on,
    solve_span,
    span_norm_bound,
)


def _unit(k: int, i: int) -> np.ndarray:
    v = np.zeros(k)
    v[i] = 1.0
    return v


def test_cap_areas_on_the_two_sphere():
    assert full_area(2) == pytest.approx(4.0 * math.pi)
    assert cap_area(2, math.pi / 2.0) == pytest.approx(2.0 * math.pi)
    assert cap_area(2, math.pi / 3.0) == pytest.approx(math.pi)
    assert cap_area(2, 2.0 * math.pi / 3.0) == pytest.approx(3.0 * math.pi)
    assert cap_area(2, math.pi) == pytest.approx(4.0 * math.pi)


def test_arcs_on_the_circle():
    assert cap_area(1, 0.3) == pytest.approx(0.6)
    assert full_area(1) == pytest.approx(2.0 * math.pi)


@pytest.mark.parametrize("d", [2, 5, 11, 40])
def test_hemisphere_is_half_the_sphere(d):
    assert cap_area(d, math.pi / 2.0) / full_area(d) == pytest.approx(0.5)


def test_log_cap_area_survives_high_dimension():
    value = log_cap_area(2000, 0.1)
    assert math.isfinite(value)
    assert value < log_cap_area(2000, 0.2)
    assert log_cap_area(3, 0.0) == -math.inf


def test_cap_area_rejects_bad_arguments():
    with pytest.raises(PreconditionError):
        cap_area(0, 1.0)
    with pytest.raises(PreconditionError):
        cap_area(2, 4.0)


@pytest.mark.parametrize(("phi1", "phi2", "k"), [(0.5, 1.0, 12), (0.2, 1.5, 9), (1.0, 1.2, 30)])
def test_cap_ratio_bounds_bracket_the_ratio(phi1, phi2, k):
    low, high = cap_ratio_bounds(phi1, phi2, k)
    ratio = cap_area(k - 1, phi1) / cap_area(k - 1, phi2)
    assert low <= ratio <= high


def test_cap_ratio_bounds_preconditions():
    with pytest.raises(PreconditionError):
        cap_ratio_bounds(1.0, 0.5, 12)
    with pytest.raises(PreconditionError):
        cap_ratio_bounds(0.5, 2.0, 12)
    with pytest.raises(PreconditionError):
        cap_ratio_bounds(0.5, 1.0, 2)


def test_cap_fraction_bound_is_just_under_one_half():
    fraction = cap_fraction_bound(11)
    assert 0.49 < fraction < 0.5


def test_solve_span_examples():
    k = 9
    assert np.allclose(solve_span([_unit(k, 0)], [0.0]), 0.0)
    v = solve_span([_unit(k, 0), _unit(k, 1)], [0.001, -0.002])
    assert v[:2] == pytest.approx([0.001, -0.002])
    assert np.allclose(v[2:], 0.0)
    assert np.linalg.norm(v) <= span_norm_bound(2, ALPHA)


def test_solve_span_rejects_out_of_range_input():
    k = 9
    with pytest.raises(PreconditionError):
        solve_span([_unit(k, 0)], [0.1])
    with pytest.raises(PreconditionError):
        tilted = (_unit(k, 0) + _unit(k, 1)) / math.sqrt(2.0)
        solve_span([_unit(k, 0), tilted], [0.0, 0.0])
    with pytest.raises(PreconditionError):
        solve_span([2.0 * _unit(k, 0)], [0.0])
    with pytest.raises(PreconditionError):
        solve_span([_unit(k, i) for i in range(8)], [0.0] * 8)
    with pytest.raises(PreconditionError):
        solve_span([_unit(k, 0)], [0.0], alpha=0.5)


@given(
    st.integers(min_value=1, max_value=7),
    st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(deadline=None, max_examples=50)
def test_solve_span_on_near_orthogonal_vectors(s, seed):
    rng = make_rng(seed)
    k = 12
    basis, _ = np.linalg.qr(rng.standard_normal((k, k)))
    vs = basis[:s] + rng.uniform(-1e-4, 1e-4, size=(s, k))
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)
    targets = rng.uniform(-ALPHA, ALPHA, size=s)
    v = solve_span(vs, targets)
    assert np.allclose(vs @ v, targets, atol=1e-9)
    assert np.linalg.norm(v) <= span_norm_bound(s, ALPHA) * (1.0 + 1e-12)


def test_boundary_intersection_of_two_caps():
    k = 9
    caps = [
        SphereCap(_unit(k, 0), math.acos(0.001)),
        SphereCap(_unit(k, 1), math.acos(-0.001)),
    ]
    boundary = boundary_intersection(caps, k)
    assert boundary.dim == k - 3
    assert boundary.radius == pytest.approx(math.sqrt(1.0 - 2e-6))
    for x in boundary.sample(make_rng("boundary"), size=20):
        assert np.linalg.norm(x) == pytest.approx(1.0)
        assert x[0] == pytest.approx(0.001)
        assert x[1] == pytest.approx(-0.001)


def test_boundary_intersection_without_caps_is_the_whole_sphere():
    boundary = boundary_intersection([], 10)
    assert boundary.dim == 9
    assert np.array_equal(boundary.offset, np.zeros(10))


def test_boundary_intersection_needs_enough_dimensions():
    with pytest.raises(PreconditionError):
        boundary_intersection([], 8)
    with pytest.raises(PreconditionError):
        boundary_intersection([SphereCap(_unit(10, 0), 1.5)], 9)


def test_sphere_cap_validation():
    with pytest.raises(PreconditionError):
        SphereCap(np.array([2.0, 0.0]), 1.0)
    with pytest.raises(PreconditionError):
        SphereCap(np.array([1.0, 0.0]), 0.0)
    cap = SphereCap(np.array([1.0, 0.0]), math.pi / 4.0)
    assert cap.contains(np.array([1.0, 0.0]))
    assert not cap.contains(np.array([0.0, 1.0]))


def test_sample_on_without_forbidden_caps(rng):
    point = sample_on(BoundarySphere.whole(9), [], rng)
    assert point is not None
    assert np.linalg.norm(point) == pytest.approx(1.0)


def test_sample_on_avoids_forbidden_caps(rng):
    k = 9
    forbidden = [SphereCap(_unit(k, 2), math.pi / 2.0)]
    for _ in range(10):
        point = sample_on(BoundarySphere.whole(k), forbidden, rng)
        assert point is not None
        assert point[2] < 0.0


def test_sample_on_gives_up_on_a_covering_cap(rng):
    k = 9
    forbidden = [SphereCap(_unit(k, 0), math.pi - 1e-9)]
    assert sample_on(BoundarySphere.whole(k), forbidden, rng, max_attempts=500) is None


def test_solve_span_ignores_the_order_of_its_vectors():
    rng = make_rng("order")
    k = 12
    basis, _ = np.linalg.qr(rng.standard_normal((k, k)))
    vs = basis[:5] + rng.uniform(-1e-4, 1e-4, size=(5, k))
    vs /= np.linalg.norm(vs, axis=1, keepdims=True)
    targets = rng.uniform(-ALPHA, ALPHA, size=5)
    order = np.array([3, 0, 4, 2, 1])
    assert np.allclose(solve_span(vs, targets), solve_span(vs[order], targets[order]), atol=1e-14)


def test_sample_on_is_reproducible_for_a_seed():
    k = 9
    forbidden = [SphereCap(_unit(k, 2), math.pi / 2.0), SphereCap(_unit(k, 5), 1.2)]
    first = sample_on(BoundarySphere.whole(k), forbidden, make_rng(17))
    second = sample_on(BoundarySphere.whole(k), forbidden, make_rng(17))
    assert first is not None
    assert np.array_equal(first, second)


@given(
    st.integers(min_value=1, max_value=5),
    st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(deadline=None, max_examples=25)
def test_boundary_intersection_points_lie_on_every_cap_boundary(s, seed):
    rng = make_rng(seed)
    k = 12
    basis, _ = np.linalg.qr(rng.standard_normal((k, k)))
    centers = basis[:s] + rng.uniform(-1e-4, 1e-4, size=(s, k))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    heights = rng.uniform(-ALPHA, ALPHA, size=s)
    caps = [SphereCap(c, math.acos(h)) for c, h in zip(centers, heights)]
    boundary = boundary_intersection(caps, k)
    assert boundary.dim == k - s - 1
    for x in boundary.sample(rng, size=100):
        assert np.linalg.norm(x) == pytest.approx(1.0)
        assert np.allclose(centers @ x, heights, atol=1e-9)
