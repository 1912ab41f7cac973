"""Realizability decisions and the labelled-metric witness for nice pairs."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Any, Iterator, Sequence

import numpy as np

from ..common.errors import ConstructionError, NotNiceError, PreconditionError
from .funcgraph import (
    Edge,
    FuncMap,
    FuncPair,
    common_edges,
    compose_fixed_points,
    edge,
    edge_types,
    long_cycle,
    shadow,
    sources,
)


logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Violation:
    kind: str
    detail: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.detail}

    def __str__(self) -> str:
        parts = ", ".join(f"{key}={value}" for key, value in self.detail.items())
        return f"{self.kind}({parts})"


@dataclass(frozen=True)
class NiceReport:
    violations: tuple[Violation, ...] = ()

    @property
    def is_nice(self) -> bool:
        return not self.violations

    def to_json(self) -> dict[str, Any]:
        return {
            "is_nice": self.is_nice,
            "violations": [v.to_json() for v in self.violations],
        }


def check(p: FuncPair) -> NiceReport:
    """Report every failed realizability condition of a pair."""
    violations: list[Violation] = []

    for side, fn in (("f", p.f), ("g", p.g)):
        cycle = long_cycle(fn)
        if cycle is not None:
            violations.append(Violation("long_cycle", {"side": side, "cycle": cycle}))

    fixed = sorted(compose_fixed_points(p))
    if len(fixed) > 1:
        violations.append(Violation("multiple_fixed_points", {"points": fixed}))

    g_sources = sources(p.g)
    f_sources = sources(p.f)
    for i in fixed:
        if i not in g_sources:
            violations.append(Violation("not_source", {"vertex": i, "side": "g"}))
        if p.g(i) not in f_sources:
            violations.append(Violation("not_source", {"vertex": p.g(i), "side": "f"}))

    return NiceReport(tuple(violations))


def check_images(f: Sequence[int], g: Sequence[int]) -> NiceReport:
    """Front end for raw 1-based image sequences.

    Fixed points and pointwise collisions cannot be held by FuncMap/FuncPair, so they
    are reported here; otherwise the sequences go through `check`.
    """
    n = len(f)
    if len(g) != n:
        raise PreconditionError(f"f has {n} images, g has {len(g)}")
    if n < 3:
        raise PreconditionError(f"a pair needs at least 3 points, got {n}")
    for name, images in (("f", f), ("g", g)):
        for i, target in enumerate(images, start=1):
            if not 1 <= target <= n:
                raise PreconditionError(f"{name}({i}) = {target} is outside 1..{n}")

    violations: list[Violation] = []
    for i in range(1, n + 1):
        if f[i - 1] == i:
            violations.append(Violation("fixed_point", {"vertex": i, "side": "f"}))
        if g[i - 1] == i:
            violations.append(Violation("fixed_point", {"vertex": i, "side": "g"}))
        if f[i - 1] == g[i - 1]:
            violations.append(Violation("collision", {"vertex": i, "image": f[i - 1]}))
    if violations:
        return NiceReport(tuple(violations))
    return check(FuncPair.of(f, g))


def single_report(f: FuncMap) -> NiceReport:
    cycle = long_cycle(f)
    if cycle is None:
        return NiceReport()
    return NiceReport((Violation("long_cycle", {"side": "f", "cycle": cycle}),))


def check_single(f: FuncMap) -> bool:
    """Min- and max-realizability coincide: no directed cycle longer than two."""
    return long_cycle(f) is None


def require_nice(p: FuncPair) -> NiceReport:
    report = check(p)
    if not report.is_nice:
        summary = "; ".join(str(v) for v in report.violations)
        raise NotNiceError(f"pair is not realizable: {summary}", report=report)
    return report


@dataclass(frozen=True)
class EdgeLabeling:
    n: int
    label: dict[Edge, int]

    def __post_init__(self) -> None:
        total = comb(self.n, 2)
        if len(self.label) != total or sorted(self.label.values()) != list(range(1, total + 1)):
            raise ConstructionError("edge labels are not a bijection onto 1..C(n,2)")

    def __getitem__(self, pair: tuple[int, int]) -> int:
        return self.label[edge(*pair)]

    def ordered(self) -> Iterator[Edge]:
        """Edges by increasing label."""
        return iter(sorted(self.label, key=self.label.__getitem__))

    def rank_at(self, v: int) -> list[int]:
        """Neighbours of v sorted by label of the joining edge."""
        others = [u for u in range(1, self.n + 1) if u != v]
        return sorted(others, key=lambda u: self[(v, u)])


def labeling_inequalities(p: FuncPair, labeling: EdgeLabeling) -> list[Violation]:
    """Vertices where the f-edge is not the lowest or the g-edge not the highest label."""
    violations = []
    for j in p.f.vertices():
        order = labeling.rank_at(j)
        if order[0] != p.f(j):
            violations.append(Violation("nearest_label", {"vertex": j, "lowest": order[0]}))
        if order[-1] != p.g(j):
            violations.append(Violation("farthest_label", {"vertex": j, "highest": order[-1]}))
    return violations


def edge_labeling(p: FuncPair) -> EdgeLabeling:
    require_nice(p)
    n = p.n
    total = comb(n, 2)

    shared = {edge(k1, k2) for k1, k2 in common_edges(p)}
    t_f = shadow(p.f).edges - shared
    t_g = shadow(p.g).edges - shared
    f_types = edge_types(p.f, t_f)
    g_types = edge_types(p.g, t_g)

    label: dict[Edge, int] = {}
    low = 0
    for e in sorted(t_f, key=lambda e: (f_types[e], e)):
        low += 1
        label[e] = low
    high = total + 1
    for e in sorted(t_g, key=lambda e: (g_types[e], e)):
        high -= 1
        label[e] = high

    # q is the fixed point of f∘g; the shared edge is {q, g(q)}
    for k1, k2 in common_edges(p):
        q, gq = k2, k1
        for v in range(1, n + 1):
            if v in (q, gq):
                continue
            e = edge(q, v)
            if e not in label:
                low += 1
                label[e] = low
        for v in range(1, n + 1):
            if v in (q, gq):
                continue
            e = edge(gq, v)
            if e not in label:
                high -= 1
                label[e] = high

    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if (i, j) not in label:
                low += 1
                label[(i, j)] = low
    if low + 1 != high:
        raise ConstructionError(f"label blocks overlap: low={low}, high={high}")

    labeling = EdgeLabeling(n, label)
    broken = labeling_inequalities(p, labeling)
    if broken:
        raise ConstructionError(f"labeling breaks the neighbour inequalities: {broken[:5]}")
    logger.debug("labelled %d edges for n=%d (T_f=%d, T_g=%d)", total, n, len(t_f), len(t_g))
    return labeling


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric matrix with zero diagonal, stored 0-based."""

    d: np.ndarray

    def __post_init__(self) -> None:
        d = np.array(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise PreconditionError(f"distance matrix must be square, got shape {d.shape}")
        if d.shape[0] < 2:
            raise PreconditionError("distance matrix needs at least 2 points")
        if not np.all(np.isfinite(d)):
            raise PreconditionError("distance matrix has non-finite entries")
        if not np.array_equal(d, d.T):
            raise PreconditionError("distance matrix is not symmetric")
        if np.any(np.diag(d) != 0.0):
            raise PreconditionError("distance matrix diagonal must be zero")
        if np.any(d < 0.0):
            raise PreconditionError("distance matrix has negative entries")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return int(self.d.shape[0])

    def __getitem__(self, pair: tuple[int, int]) -> float:
        i, j = pair
        return float(self.d[i - 1, j - 1])

    def off_diagonal(self) -> np.ndarray:
        rows, cols = np.triu_indices(self.n, k=1)
        return self.d[rows, cols]


def witness_values(n: int) -> np.ndarray:
    """a_1 < … < a_N inside (1, 2) with a_t = 1 + t/(N+1); index 0 unused."""
    total = comb(n, 2)
    return 1.0 + np.arange(total + 1, dtype=float) / (total + 1)


def metric_witness(p: FuncPair) -> DistanceMatrix:
    labeling = edge_labeling(p)
    values = witness_values(p.n)
    d = np.zeros((p.n, p.n))
    for (i, j), t in labeling.label.items():
        d[i - 1, j - 1] = d[j - 1, i - 1] = values[t]
    return DistanceMatrix(d)
