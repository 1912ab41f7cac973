from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import nice_pairs
from realizer.common.errors import ConstructionError, NotNiceError, PreconditionError
from realizer.core.funcgraph import FuncMap, FuncPair
from realizer.core.realize import (
    DistanceMatrix,
    EdgeLabeling,
    check,
    check_images,
    check_single,
    edge_labeling,
    labeling_inequalities,
    metric_witness,
    require_nice,
    single_report,
    witness_values,
)
from realizer.core.verify import extract_maps, is_metric
from realizer.data.families import btree


def _kinds(report):
    return sorted(v.kind for v in report.violations)


def test_croft6_is_nice(croft6_pair):
    assert check(croft6_pair).is_nice


def test_three_cycle_is_reported():
    report = check(FuncPair.of([2, 3, 1], [3, 1, 2]))
    assert not report.is_nice
    cycles = [v.detail for v in report.violations if v.kind == "long_cycle"]
    assert {"side": "f", "cycle": [1, 2, 3]} in cycles


def test_two_fixed_points_of_the_composition():
    report = check(FuncPair.of([2, 1, 1, 2], [3, 4, 4, 3]))
    assert "multiple_fixed_points" in _kinds(report)
    assert report.violations[0].detail == {"points": [1, 2]}


def test_fixed_point_must_be_a_source_of_g():
    report = check(FuncPair.of([4, 3, 1, 1], [3, 1, 4, 3]))
    assert not report.is_nice
    assert {"vertex": 1, "side": "g"} in [v.detail for v in report.violations if v.kind == "not_source"]


def test_check_images_reports_fixed_points_and_collisions():
    report = check_images([1, 1, 2], [3, 3, 1])
    assert "fixed_point" in _kinds(report)
    report = check_images([2, 1, 1], [2, 3, 1])
    assert set(_kinds(report)) == {"collision"}
    assert check_images([2, 1, 2], [3, 3, 1]).is_nice
    with pytest.raises(PreconditionError):
        check_images([2, 1], [2, 1])


def test_report_serializes():
    document = check(FuncPair.of([2, 1, 1, 2], [3, 4, 4, 3])).to_json()
    assert document["is_nice"] is False
    assert document["violations"][0]["kind"] == "multiple_fixed_points"


def test_require_nice_raises_with_report():
    with pytest.raises(NotNiceError) as info:
        require_nice(FuncPair.of([2, 1, 1, 2], [3, 4, 4, 3]))
    assert info.value.report is not None
    assert not info.value.report.is_nice


def test_check_single():
    assert not check_single(FuncMap((2, 3, 1)))
    assert check_single(FuncMap((2, 1, 1)))
    assert check_single(btree(3))
    assert single_report(FuncMap((2, 3, 1))).violations[0].detail["cycle"] == [1, 2, 3]


def test_labeling_of_the_three_point_pair(tri3):
    labeling = edge_labeling(tri3)
    assert labeling[(1, 2)] == 1
    assert labeling[(2, 3)] == 2
    assert labeling[(3, 1)] == 3
    assert list(labeling.ordered()) == [(1, 2), (2, 3), (1, 3)]


def test_labeling_of_croft6(croft6_pair):
    labeling = edge_labeling(croft6_pair)
    assert all(1 <= labeling[(i, 6)] <= 5 for i in range(1, 6))
    assert labeling[(1, 6)] == 1
    assert all(9 <= labeling[(i, 2)] <= 15 for i in (1, 3, 4, 5))
    assert labeling[(1, 2)] == 15
    assert labeling_inequalities(croft6_pair, labeling) == []


def test_edge_labeling_rejects_non_nice_pairs():
    with pytest.raises(NotNiceError):
        edge_labeling(FuncPair.of([2, 1, 1, 2], [3, 4, 4, 3]))


def test_edge_labeling_type_is_a_bijection():
    with pytest.raises(ConstructionError):
        EdgeLabeling(3, {(1, 2): 1, (1, 3): 1, (2, 3): 2})


def test_labeling_inequalities_flag_a_swapped_label(tri3):
    swapped = EdgeLabeling(3, {(1, 2): 3, (2, 3): 2, (1, 3): 1})
    kinds = {v.kind for v in labeling_inequalities(tri3, swapped)}
    assert kinds == {"nearest_label", "farthest_label"}


def test_metric_witness_of_the_three_point_pair(tri3):
    d = metric_witness(tri3)
    assert d[(1, 2)] == pytest.approx(1.25)
    assert d[(2, 3)] == pytest.approx(1.5)
    assert d[(1, 3)] == pytest.approx(1.75)
    assert np.array_equal(d.d, d.d.T)


def test_metric_witness_round_trips_croft6(croft6_pair):
    d = metric_witness(croft6_pair)
    maps = extract_maps(d)
    assert maps.distinct
    assert maps.nearest == croft6_pair.f
    assert maps.farthest == croft6_pair.g
    assert is_metric(d)


def test_witness_values_lie_strictly_between_one_and_two():
    values = witness_values(6)[1:]
    assert values.shape == (15,)
    assert np.all(np.diff(values) > 0)
    assert values[0] > 1.0 and values[-1] < 2.0


def test_distance_matrix_validation():
    with pytest.raises(PreconditionError):
        DistanceMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]))
    with pytest.raises(PreconditionError):
        DistanceMatrix(np.array([[1.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(PreconditionError):
        DistanceMatrix(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    d = DistanceMatrix(np.array([[0.0, 3.0], [3.0, 0.0]]))
    with pytest.raises(ValueError):
        d.d[0, 1] = 4.0


@given(nice_pairs(max_n=40))
@settings(deadline=None, max_examples=60)
def test_witness_round_trip_property(p):
    d = metric_witness(p)
    maps = extract_maps(d)
    assert maps.distinct
    assert maps.nearest == p.f
    assert maps.farthest == p.g
    assert is_metric(d)
    assert labeling_inequalities(p, edge_labeling(p)) == []
