"""Fixed-point-free maps on [n] and the undirected graphs derived from them.

Vertices are 1-based everywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import networkx as nx
import numpy as np

from ..common.errors import PreconditionError


Edge = tuple[int, int]


def edge(i: int, j: int) -> Edge:
    """Canonical unordered pair."""
    if i == j:
        raise PreconditionError(f"loop edge at {i}")
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class FuncMap:
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        image = tuple(int(x) for x in self.image)
        object.__setattr__(self, "image", image)
        n = len(image)
        if n < 2:
            raise PreconditionError(f"a map needs at least 2 points, got {n}")
        for i, target in enumerate(image, start=1):
            if not 1 <= target <= n:
                raise PreconditionError(f"image of {i} is {target}, outside 1..{n}")
            if target == i:
                raise PreconditionError(f"{i} is a fixed point")

    @classmethod
    def from_zero_based(cls, image: Iterable[int]) -> FuncMap:
        return cls(tuple(int(x) + 1 for x in image))

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, i: int) -> int:
        return self.image[i - 1]

    def __iter__(self) -> Iterator[int]:
        return iter(self.image)

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def zero_based(self) -> np.ndarray:
        return np.asarray(self.image, dtype=np.int64) - 1

    def iterate(self, i: int, times: int) -> int:
        for _ in range(times):
            i = self(i)
        return i

    def in_degrees(self) -> tuple[int, ...]:
        counts = [0] * self.n
        for target in self.image:
            counts[target - 1] += 1
        return tuple(counts)

    def restrict(self, vertices: Sequence[int]) -> FuncMap:
        """Relabel a forward-closed vertex subset to 1..len(vertices), keeping order."""
        relabel = {v: position for position, v in enumerate(vertices, start=1)}
        try:
            return FuncMap(tuple(relabel[self(v)] for v in vertices))
        except KeyError as exc:
            raise PreconditionError(f"vertex set is not closed under the map: {exc.args[0]}") from exc


@dataclass(frozen=True)
class FuncPair:
    f: FuncMap
    g: FuncMap

    def __post_init__(self) -> None:
        if self.f.n != self.g.n:
            raise PreconditionError(f"f has {self.f.n} points, g has {self.g.n}")
        if self.f.n < 3:
            raise PreconditionError(f"a pair needs at least 3 points, got {self.f.n}")
        for i in self.f.vertices():
            if self.f(i) == self.g(i):
                raise PreconditionError(f"f({i}) = g({i}) = {self.f(i)}")

    @classmethod
    def of(cls, f: Sequence[int], g: Sequence[int]) -> FuncPair:
        return cls(FuncMap(tuple(f)), FuncMap(tuple(g)))

    @property
    def n(self) -> int:
        return self.f.n


@dataclass(frozen=True)
class LevelPartition:
    m: int
    level: tuple[int, ...]

    def of(self, i: int) -> int:
        return self.level[i - 1]

    def sets(self) -> list[frozenset[int]]:
        buckets: list[set[int]] = [set() for _ in range(self.m + 1)]
        for i, lvl in enumerate(self.level, start=1):
            buckets[lvl].add(i)
        return [frozenset(bucket) for bucket in buckets]


@dataclass(frozen=True)
class EdgeSet:
    n: int
    edges: frozenset[Edge]

    def __post_init__(self) -> None:
        for i, j in self.edges:
            if not (1 <= i < j <= self.n):
                raise PreconditionError(f"edge {(i, j)} is not canonical within 1..{self.n}")

    @classmethod
    def build(cls, n: int, pairs: Iterable[tuple[int, int]]) -> EdgeSet:
        return cls(n, frozenset(edge(i, j) for i, j in pairs))

    def __contains__(self, pair: object) -> bool:
        if not isinstance(pair, tuple) or len(pair) != 2:
            return False
        i, j = pair
        return i != j and edge(i, j) in self.edges

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self) -> Iterator[Edge]:
        return iter(sorted(self.edges))

    def __or__(self, other: EdgeSet) -> EdgeSet:
        return EdgeSet(max(self.n, other.n), self.edges | other.edges)

    def __and__(self, other: EdgeSet) -> EdgeSet:
        return EdgeSet(max(self.n, other.n), self.edges & other.edges)

    def __sub__(self, other: EdgeSet) -> EdgeSet:
        return EdgeSet(self.n, self.edges - other.edges)

    def neighbors(self, v: int) -> list[int]:
        return sorted(j if i == v else i for i, j in self.edges if v in (i, j))

    def incident(self, v: int) -> list[Edge]:
        return sorted(e for e in self.edges if v in e)

    def to_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(1, self.n + 1))
        graph.add_edges_from(self.edges)
        return graph


def long_cycle(f: FuncMap) -> list[int] | None:
    """Some directed cycle of length at least 3, rotated to start at its smallest vertex."""
    finished = [False] * (f.n + 1)
    for start in f.vertices():
        if finished[start]:
            continue
        position: dict[int, int] = {}
        path: list[int] = []
        v = start
        while not finished[v] and v not in position:
            position[v] = len(path)
            path.append(v)
            v = f(v)
        if not finished[v]:
            cycle = path[position[v]:]
            if len(cycle) >= 3:
                pivot = cycle.index(min(cycle))
                return cycle[pivot:] + cycle[:pivot]
        for u in path:
            finished[u] = True
    return None


def level_partition(f: FuncMap) -> LevelPartition:
    cycle = long_cycle(f)
    if cycle is not None:
        raise PreconditionError(f"map has a cycle of length {len(cycle)}: {cycle}")

    level = [-1] * (f.n + 1)
    for i in f.vertices():
        if f(f(i)) == i:
            level[i] = 0
    for start in f.vertices():
        trail = []
        v = start
        while level[v] < 0:
            trail.append(v)
            v = f(v)
        depth = level[v]
        for u in reversed(trail):
            depth += 1
            level[u] = depth
    levels = tuple(level[1:])
    return LevelPartition(m=max(levels), level=levels)


def shadow(f: FuncMap) -> EdgeSet:
    return EdgeSet.build(f.n, ((i, f(i)) for i in f.vertices()))


def twocycles(f: FuncMap) -> list[Edge]:
    return sorted({edge(i, f(i)) for i in f.vertices() if f(f(i)) == i})


def components(f: FuncMap) -> list[list[int]]:
    """Vertex sets of the connected components of the shadow, ordered by smallest vertex."""
    graph = shadow(f).to_graph()
    return sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])


def sources(f: FuncMap) -> frozenset[int]:
    hit = set(f.image)
    return frozenset(v for v in f.vertices() if v not in hit)


def common_edges(p: FuncPair) -> list[tuple[int, int]]:
    """Every (k1, k2) with f(k1) = k2 and g(k2) = k1, i.e. each edge of H_f ∩ H_g."""
    return [(k1, p.f(k1)) for k1 in p.f.vertices() if p.g(p.f(k1)) == k1]


def common_edge(p: FuncPair) -> tuple[int, int] | None:
    found = common_edges(p)
    if len(found) > 1:
        raise PreconditionError(f"shadows share {len(found)} edges {found}; the pair is not nice")
    return found[0] if found else None


def constraint_graph(p: FuncPair) -> EdgeSet:
    pairs = set(shadow(p.f).edges | shadow(p.g).edges)
    for k1, k2 in common_edges(p):
        for v in p.f.vertices():
            if v != k1:
                pairs.add(edge(k1, v))
            if v != k2:
                pairs.add(edge(k2, v))
    return EdgeSet(p.n, frozenset(pairs))


def compose_fixed_points(p: FuncPair) -> frozenset[int]:
    return frozenset(i for i in p.f.vertices() if p.f(p.g(i)) == i)


def edge_types(f: FuncMap, edges: Iterable[Edge]) -> dict[Edge, int]:
    """Level type of each f-edge: 0 inside the 2-cycle core, otherwise the larger endpoint level."""
    levels = level_partition(f)
    return {e: max(levels.of(e[0]), levels.of(e[1])) for e in edges}


def split_sides(f: FuncMap, a0: int, b0: int) -> tuple[frozenset[int], frozenset[int]]:
    """Split a component hanging off the 2-cycle (a0, b0) by which end each tree drains into."""
    if f(a0) != b0 or f(b0) != a0:
        raise PreconditionError(f"({a0}, {b0}) is not a 2-cycle")
    side_a, side_b = {a0}, {b0}
    graph = shadow(f).to_graph()
    component = nx.node_connected_component(graph, a0)
    for v in sorted(component):
        if v in side_a or v in side_b:
            continue
        trail = [v]
        while trail[-1] not in (a0, b0):
            trail.append(f(trail[-1]))
        (side_a if trail[-1] == a0 else side_b).add(v)
    return frozenset(side_a), frozenset(side_b)
