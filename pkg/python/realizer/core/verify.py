"""Ground truth: neighbour maps from distances, metric checks, certification and the
brute-force order oracle for small n."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Literal

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ..common.errors import PreconditionError
from .funcgraph import FuncMap, FuncPair, edge
from .realize import DistanceMatrix


logger = logging.getLogger(__name__)

ORACLE_MAX_N = 5
EXHAUSTIVE_MAX_N = 4

Mode = Literal["nearest", "farthest"]


@dataclass(frozen=True, eq=False)
class PointConfig:
    coords: np.ndarray

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=float)
        if coords.ndim != 2 or coords.shape[0] < 2 or coords.shape[1] < 1:
            raise PreconditionError(f"expected an (n, k) array with n >= 2, got shape {coords.shape}")
        if not np.all(np.isfinite(coords)):
            raise PreconditionError("point coordinates must be finite")
        if np.unique(coords, axis=0).shape[0] != coords.shape[0]:
            raise PreconditionError("points are not pairwise distinct")
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    @property
    def k(self) -> int:
        return int(self.coords.shape[1])

    def point(self, i: int) -> np.ndarray:
        return self.coords[i - 1]


@dataclass(frozen=True)
class MapsResult:
    nearest: FuncMap
    farthest: FuncMap
    distinct: bool


@dataclass(frozen=True)
class CertifyReport:
    ok: bool
    distinct: bool
    nearest_mismatches: list[dict[str, int]] = field(default_factory=list)
    farthest_mismatches: list[dict[str, int]] = field(default_factory=list)

    def to_json(self) -> dict[str, Any]:
        return {
            "ok": self.ok,
            "distinct": self.distinct,
            "nearest_mismatches": self.nearest_mismatches,
            "farthest_mismatches": self.farthest_mismatches,
        }


def extract_maps(d: DistanceMatrix) -> MapsResult:
    """Row-wise argmin/argmax over j != i; ties go to the smallest index."""
    values = d.d
    masked_low = values.copy()
    np.fill_diagonal(masked_low, np.inf)
    masked_high = values.copy()
    np.fill_diagonal(masked_high, -np.inf)

    off = d.off_diagonal()
    distinct = np.unique(off).size == off.size
    return MapsResult(
        nearest=FuncMap.from_zero_based(np.argmin(masked_low, axis=1)),
        farthest=FuncMap.from_zero_based(np.argmax(masked_high, axis=1)),
        distinct=bool(distinct),
    )


def is_metric(d: DistanceMatrix, rtol: float = 0.0) -> bool:
    """Positivity and the triangle inequality.

    The check is exact by default. Distances computed from coordinates pass `rtol`, a slack
    relative to the largest distance, to absorb rounding.
    """
    off = d.off_diagonal()
    if np.any(off <= 0.0):
        return False
    values = d.d
    slack = rtol * float(off.max())
    via = values[:, :, None] + values[None, :, :]
    return bool(np.all(via >= values[:, None, :] - slack))


def distances(c: PointConfig) -> DistanceMatrix:
    return DistanceMatrix(squareform(pdist(c.coords)))


def maps_of_points(c: PointConfig) -> MapsResult:
    return extract_maps(distances(c))


def _mismatches(expected: FuncMap, found: FuncMap) -> list[dict[str, int]]:
    return [
        {"vertex": i, "expected": expected(i), "found": found(i)}
        for i in expected.vertices()
        if expected(i) != found(i)
    ]


def certify(c: PointConfig, p: FuncPair) -> CertifyReport:
    if c.n != p.n:
        raise PreconditionError(f"{c.n} points for a pair on {p.n}")
    maps = maps_of_points(c)
    near = _mismatches(p.f, maps.nearest)
    far = _mismatches(p.g, maps.farthest)
    return CertifyReport(
        ok=maps.distinct and not near and not far,
        distinct=maps.distinct,
        nearest_mismatches=near,
        farthest_mismatches=far,
    )


def certify_farthest(c: PointConfig, g: FuncMap) -> CertifyReport:
    if c.n != g.n:
        raise PreconditionError(f"{c.n} points for a map on {g.n}")
    maps = maps_of_points(c)
    far = _mismatches(g, maps.farthest)
    return CertifyReport(ok=maps.distinct and not far, distinct=maps.distinct, farthest_mismatches=far)


def _row_without(values: np.ndarray, i: int, exclude: int) -> np.ndarray:
    keep = np.ones(values.shape[0], dtype=bool)
    keep[[i, exclude]] = False
    return values[i, keep]


def nearest_margin(d: DistanceMatrix, f: FuncMap) -> float:
    """Smallest gap between a point's second-nearest distance and its f-distance."""
    if d.n < 3:
        return float("inf")
    gaps = []
    for i, target in enumerate(f.zero_based()):
        gaps.append(_row_without(d.d, i, target).min() - d.d[i, target])
    return float(min(gaps))


def farthest_margin(d: DistanceMatrix, g: FuncMap) -> float:
    if d.n < 3:
        return float("inf")
    gaps = []
    for i, target in enumerate(g.zero_based()):
        gaps.append(d.d[i, target] - _row_without(d.d, i, target).max())
    return float(min(gaps))


def pair_margin(d: DistanceMatrix, p: FuncPair) -> float:
    return min(nearest_margin(d, p.f), farthest_margin(d, p.g))


def hub_angles(c: PointConfig, hub: int) -> dict[tuple[int, int], float]:
    """Angle at `hub` between the rays to every other pair of points."""
    origin = c.point(hub)
    others = [i for i in range(1, c.n + 1) if i != hub]
    rays = {i: c.point(i) - origin for i in others}
    angles = {}
    for i, j in itertools.combinations(others, 2):
        u, v = rays[i], rays[j]
        cosine = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
        angles[(i, j)] = float(np.arccos(np.clip(cosine, -1.0, 1.0)))
    return angles


def _row_pairs(n: int) -> tuple[list[tuple[int, int]], dict[tuple[int, int], int]]:
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    return pairs, {pair: index for index, pair in enumerate(pairs)}


def _precedence(n: int, lowest: FuncMap | None, highest: FuncMap | None) -> list[int]:
    """Predecessor bitmask per pair: lowest-at-row pairs come first, highest-at-row pairs last."""
    pairs, index = _row_pairs(n)
    preds = [0] * len(pairs)
    for i in range(1, n + 1):
        row = [index[edge(i, j)] for j in range(1, n + 1) if j != i]
        if lowest is not None:
            first = index[edge(i, lowest(i))]
            for other in row:
                if other != first:
                    preds[other] |= 1 << first
        if highest is not None:
            last = index[edge(i, highest(i))]
            for other in row:
                if other != last:
                    preds[last] |= 1 << other
    return preds


def _has_linear_extension(preds: list[int]) -> bool:
    """Depth-first placement of pairs in increasing order, memoising dead placed-sets."""
    full = (1 << len(preds)) - 1
    dead: set[int] = set()

    def extend(placed: int) -> bool:
        if placed == full:
            return True
        if placed in dead:
            return False
        for slot, need in enumerate(preds):
            bit = 1 << slot
            if placed & bit or need & ~placed:
                continue
            if extend(placed | bit):
                return True
        dead.add(placed)
        return False

    found = extend(0)
    logger.debug("order search visited %d dead states", len(dead))
    return found


def _oracle_guard(n: int, limit: int) -> None:
    if n > limit:
        raise PreconditionError(f"order enumeration is limited to n <= {limit}, got {n}")


def oracle(p: FuncPair) -> bool:
    """Does some strict order of the pair distances induce (f, g) row by row."""
    _oracle_guard(p.n, ORACLE_MAX_N)
    return _has_linear_extension(_precedence(p.n, p.f, p.g))


def oracle_single(f: FuncMap, mode: Mode) -> bool:
    _oracle_guard(f.n, ORACLE_MAX_N)
    if f.n < 3:
        raise PreconditionError("order enumeration needs at least 3 points")
    if mode == "nearest":
        preds = _precedence(f.n, f, None)
    elif mode == "farthest":
        preds = _precedence(f.n, None, f)
    else:
        raise PreconditionError(f"unknown mode {mode!r}")
    return _has_linear_extension(preds)


def oracle_exhaustive(p: FuncPair) -> bool:
    """Unpruned check over every permutation of the pairs."""
    _oracle_guard(p.n, EXHAUSTIVE_MAX_N)
    pairs, _ = _row_pairs(p.n)
    vertices = range(1, p.n + 1)
    for order in itertools.permutations(range(len(pairs))):
        rank = {pairs[slot]: position for position, slot in enumerate(order)}
        for i in vertices:
            row = sorted((j for j in vertices if j != i), key=lambda j: rank[edge(i, j)])
            if row[0] != p.f(i) or row[-1] != p.g(i):
                break
        else:
            return True
    return False
