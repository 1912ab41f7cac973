from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from realizer.common.errors import PreconditionError
from realizer.common.instances import load_instance
from realizer.common.runtime import make_rng
from realizer.core.funcgraph import FuncMap, FuncPair, common_edges, components, level_partition, long_cycle
from realizer.core.realize import check, check_single
from realizer.data.families import (
    btree,
    btree_levels,
    croft6,
    enumerate_maps,
    enumerate_pairs,
    family,
    random_forest_map,
    random_nice_pair,
    star,
    twofix4,
)
from realizer.data.generate_instances import named_instances, random_records


def test_named_families():
    assert croft6().f.image == (6, 6, 6, 6, 6, 1)
    assert check(croft6()).is_nice
    assert star(5).f.image == (5, 5, 5, 5, 1)
    assert star(5).g.image == (2, 1, 1, 1, 2)
    assert check(star(9)).is_nice
    assert not check(twofix4()).is_nice
    with pytest.raises(PreconditionError):
        star(2)


def test_binary_tree():
    assert btree(2).image == (8, 1, 1, 2, 2, 3, 3, 1)
    assert btree_levels(2) == [[1], [2, 3], [4, 5, 6, 7]]
    assert check_single(btree(4))
    assert level_partition(btree(3)).m == 3
    with pytest.raises(PreconditionError):
        btree(0)


def test_family_dispatch():
    assert family("croft6") == croft6()
    assert family("star", 6) == star(6)
    assert family("btree", 2) == btree(2)
    with pytest.raises(PreconditionError):
        family("star")
    with pytest.raises(PreconditionError):
        family("wheel", 3)


def test_enumeration_counts():
    assert sum(1 for _ in enumerate_maps(3)) == 8
    assert sum(1 for _ in enumerate_maps(4)) == 81
    assert sum(1 for _ in enumerate_pairs(3)) == 8
    assert sum(1 for _ in enumerate_pairs(4)) == 81 * 16


def test_random_forest_map_respects_components_and_depth(rng):
    f = random_forest_map(20, rng, components=3, max_depth=2)
    assert long_cycle(f) is None
    assert len(components(f)) == 3
    assert level_partition(f).m <= 2
    with pytest.raises(PreconditionError):
        random_forest_map(5, rng, components=3)


def test_random_nice_pair_on_three_points(rng):
    for _ in range(10):
        p = random_nice_pair(3, rng)
        assert check(p).is_nice
        assert len(common_edges(p)) == 1
    with pytest.raises(PreconditionError):
        random_nice_pair(3, rng, shared_edge=False)


@given(
    st.integers(min_value=4, max_value=40),
    st.booleans(),
    st.integers(min_value=0, max_value=2**32 - 1),
)
@settings(deadline=None, max_examples=60)
def test_random_nice_pair_property(n, shared, seed):
    p = random_nice_pair(n, make_rng(seed), shared_edge=shared)
    assert isinstance(p, FuncPair)
    assert check(p).is_nice
    assert len(common_edges(p)) == (1 if shared else 0)


def test_fixture_files_match_the_generator(fixture_dir):
    for name, instance in named_instances().items():
        assert load_instance(fixture_dir / f"{name}.json") == instance


def test_random_records_are_valid():
    pairs = random_records(5, 3, 12, "records", "pair")
    assert len(pairs) == 5
    for record in pairs:
        assert check(FuncPair.of(record["f"], record["g"])).is_nice
        assert record["metadata"]["seed"] == "records"
    for record in random_records(5, 3, 12, "records", "map"):
        assert "g" not in record
        assert check_single(FuncMap(tuple(record["f"])))
    assert random_records(3, 3, 12, "same", "pair") == random_records(3, 3, 12, "same", "pair")
