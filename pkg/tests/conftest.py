from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

REPO_ROOT = Path(__file__).resolve().parents[1]
PYTHON_ROOT = REPO_ROOT / "python"
if str(PYTHON_ROOT) not in sys.path:
    sys.path.insert(0, str(PYTHON_ROOT))

from realizer.common.runtime import make_rng  # noqa: E402
from realizer.core.funcgraph import FuncMap, FuncPair  # noqa: E402
from realizer.data.families import croft6, random_forest_map, random_nice_pair  # noqa: E402


FIXTURE_DIR = REPO_ROOT / "data" / "instances"


@pytest.fixture
def croft6_pair() -> FuncPair:
    return croft6()


@pytest.fixture
def tri3() -> FuncPair:
    return FuncPair.of([2, 1, 2], [3, 3, 1])


@pytest.fixture
def rng() -> np.random.Generator:
    return make_rng("tests")


@pytest.fixture
def fixture_dir() -> Path:
    return FIXTURE_DIR


@st.composite
def fixed_point_free_maps(draw, min_n: int = 2, max_n: int = 9) -> FuncMap:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    image = []
    for i in range(1, n + 1):
        target = draw(st.integers(min_value=1, max_value=n - 1))
        image.append(target + 1 if target >= i else target)
    return FuncMap(tuple(image))


@st.composite
def nice_pairs(draw, min_n: int = 3, max_n: int = 24) -> FuncPair:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    shared = draw(st.booleans()) if n > 3 else True
    return random_nice_pair(n, make_rng(seed), shared_edge=shared)


@st.composite
def forest_maps(draw, min_n: int = 3, max_n: int = 25) -> FuncMap:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    seed = draw(st.integers(min_value=0, max_value=2**32 - 1))
    rng = make_rng(seed)
    components = int(rng.integers(1, min(4, n // 2) + 1))
    return random_forest_map(n, rng, components=components)
