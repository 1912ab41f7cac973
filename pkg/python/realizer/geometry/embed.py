"""Euclidean witnesses for nice pairs.

`simplex` always succeeds in R^{n-1}. `spherical_embed` places the points one at a time on
S^{k-1}, prescribing angles along the constraint graph, and may run out of sampling budget.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np
from scipy import linalg

from ..common.errors import ConstructionError, PreconditionError, ShrinkBudgetError
from ..common.runtime import SeedLike, make_rng
from ..core.funcgraph import Edge, FuncMap, FuncPair, common_edge, constraint_graph, edge, shadow
from ..core.realize import DistanceMatrix, edge_labeling, metric_witness, require_nice
from ..core.verify import (
    CertifyReport,
    PointConfig,
    certify,
    certify_farthest,
    distances,
    farthest_margin,
    pair_margin,
)
from .spherical import ALPHA, MIN_DIMENSION, SphereCap, boundary_intersection, sample_on


logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-9
MAX_BACK_DEGREE = 7
WINDOW_MARGIN = 0.01
SHRINK_BUDGET = 40


@dataclass(frozen=True)
class EmbedParams:
    k: int = 12
    seed: SeedLike = 0
    alpha_const: float = ALPHA
    max_attempts_per_point: int = 10_000
    max_restarts: int = 20
    perturb_scale: float = 1e-6
    pin_bands: bool = True
    probe_attempts: int = 64

    def __post_init__(self) -> None:
        if self.k < MIN_DIMENSION:
            raise PreconditionError(f"spherical construction needs k >= {MIN_DIMENSION}, got {self.k}")
        if not 0.0 < self.alpha_const < 1.0 / 200.0:
            raise PreconditionError(f"alpha_const must lie in (0, 1/200), got {self.alpha_const!r}")
        if not 0.0 < self.perturb_scale < 0.5:
            raise PreconditionError(f"perturb_scale must lie in (0, 1/2), got {self.perturb_scale!r}")
        if self.max_attempts_per_point < 1 or self.max_restarts < 1:
            raise PreconditionError("sampling budgets must be positive")

    @property
    def delta(self) -> float:
        """Angular radius of the caps a non-neighbour must avoid."""
        return math.acos(self.alpha_const / 2.0)


@dataclass(frozen=True)
class AngleTable:
    n: int
    alpha: dict[Edge, float]

    def __post_init__(self) -> None:
        values = list(self.alpha.values())
        if len(set(values)) != len(values):
            raise ConstructionError("prescribed angles are not distinct")

    def __getitem__(self, pair: tuple[int, int]) -> float:
        return self.alpha[edge(*pair)]

    def __contains__(self, pair: object) -> bool:
        if not isinstance(pair, tuple) or len(pair) != 2 or pair[0] == pair[1]:
            return False
        return edge(*pair) in self.alpha


def angle_windows(alpha: float = ALPHA) -> dict[str, tuple[float, float]]:
    half = alpha / 2.0
    return {
        "nearest": (math.acos(alpha), math.acos(half)),
        "near_star": (math.acos(half), 0.5 * math.pi),
        "far_star": (0.5 * math.pi, math.acos(-half)),
        "farthest": (math.acos(-half), math.acos(-alpha)),
    }


def _spread(window: tuple[float, float], count: int) -> np.ndarray:
    lo, hi = window
    pad = WINDOW_MARGIN * (hi - lo)
    if count == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo + pad, hi - pad, count)


def angle_table(p: FuncPair, alpha: float = ALPHA) -> AngleTable:
    """Prescribed angles on the constraint graph, increasing with the edge label."""
    labeling = edge_labeling(p)
    h_f = shadow(p.f).edges
    h_g = shadow(p.g).edges
    shared = common_edge(p)

    groups: dict[str, list[Edge]] = {name: [] for name in angle_windows(alpha)}
    table: dict[Edge, float] = {}
    for e in constraint_graph(p):
        if e in h_f and e not in h_g:
            groups["nearest"].append(e)
        elif e in h_g and e not in h_f:
            groups["farthest"].append(e)
        elif shared is not None and e == edge(*shared):
            table[e] = 0.5 * math.pi
        elif shared is not None and shared[1] in e:
            groups["near_star"].append(e)
        elif shared is not None and shared[0] in e:
            groups["far_star"].append(e)
        else:
            raise ConstructionError(f"edge {e} has no angle window")

    windows = angle_windows(alpha)
    for name, edges in groups.items():
        if not edges:
            continue
        edges.sort(key=lambda e: labeling[e])
        for e, value in zip(edges, _spread(windows[name], len(edges))):
            table[e] = float(value)
    return AngleTable(p.n, table)


def elimination_order(p: FuncPair) -> list[int]:
    """Vertex order in which each vertex has at most 7 earlier constraint neighbours."""
    require_nice(p)
    graph = constraint_graph(p).to_graph()
    removed: list[int] = []
    while graph.number_of_nodes():
        vertex, degree = min(graph.degree, key=lambda item: (item[1], item[0]))
        if degree > MAX_BACK_DEGREE:
            raise ConstructionError(f"every remaining vertex has degree above {MAX_BACK_DEGREE}")
        removed.append(vertex)
        graph.remove_node(vertex)
    return removed[::-1]


def back_degrees(p: FuncPair, order: list[int]) -> dict[int, int]:
    graph = constraint_graph(p)
    seen: set[int] = set()
    degrees = {}
    for v in order:
        degrees[v] = sum(1 for u in graph.neighbors(v) if u in seen)
        seen.add(v)
    return degrees


def compressed_witness(p: FuncPair) -> DistanceMatrix:
    """Witness distances squeezed into (1, 1 + 1/(4n^2))."""
    d = metric_witness(p).d
    squeezed = 1.0 + (d - 1.0) / (4.0 * p.n * p.n)
    np.fill_diagonal(squeezed, 0.0)
    return DistanceMatrix(squeezed)


def simplex(p: FuncPair) -> PointConfig:
    """Classical scaling of the squeezed witness: a slightly irregular simplex in R^{n-1}."""
    d = compressed_witness(p).d
    n = p.n
    centering = np.eye(n) - np.full((n, n), 1.0 / n)
    gram = -0.5 * centering @ (d * d) @ centering
    eigenvalues, eigenvectors = linalg.eigh(gram)
    if eigenvalues[0] < -PSD_TOLERANCE:
        raise ConstructionError(f"centred Gram matrix is not PSD (min eigenvalue {eigenvalues[0]:.3e})")

    top = slice(1, n)
    scales = np.sqrt(np.clip(eigenvalues[top], 0.0, None))
    coords = eigenvectors[:, top] * scales[None, :]
    config = PointConfig(coords)

    report = certify(config, p)
    if not report.ok:
        raise ConstructionError(f"simplex embedding does not certify: {report.to_json()}")
    return config


@dataclass
class PlacementStats:
    restarts: int = 0
    pinned: int = 0
    rejected_points: int = 0
    extra: dict[str, Any] = field(default_factory=dict)


def _place_vertex(
    vertex: int,
    placed: dict[int, np.ndarray],
    graph_neighbors: set[int],
    table: AngleTable,
    params: EmbedParams,
    rng: np.random.Generator,
    stats: PlacementStats,
) -> np.ndarray | None:
    earlier = sorted(placed)
    neighbours = [u for u in earlier if u in graph_neighbors]
    strangers = [u for u in earlier if u not in graph_neighbors]

    caps = [SphereCap(placed[u], table[(u, vertex)]) for u in neighbours]
    forbidden = []
    for u in strangers:
        forbidden.append(SphereCap(placed[u], params.delta))
        forbidden.append(SphereCap(-placed[u], params.delta))

    span_limit = params.k - 2
    boundary = boundary_intersection(caps, params.k, alpha=params.alpha_const, max_vectors=span_limit)
    if not strangers:
        return sample_on(boundary, [], rng, max_attempts=1)

    point = sample_on(boundary, forbidden, rng, max_attempts=params.probe_attempts)
    if point is not None or not params.pin_bands:
        if point is None:
            point = sample_on(boundary, forbidden, rng, max_attempts=params.max_attempts_per_point)
        return point

    budget = max(0, span_limit - len(neighbours))
    pins = strangers[:budget]
    band = params.alpha_const / 4.0
    for u in pins:
        caps.append(SphereCap(placed[u], math.acos(float(rng.uniform(-band, band)))))
    stats.pinned += len(pins)
    logger.debug("vertex %d: pinned %d of %d non-neighbours", vertex, len(pins), len(strangers))
    boundary = boundary_intersection(caps, params.k, alpha=params.alpha_const, max_vectors=span_limit)
    return sample_on(boundary, forbidden, rng, max_attempts=params.max_attempts_per_point)


def _place_all(
    p: FuncPair,
    order: list[int],
    table: AngleTable,
    params: EmbedParams,
    rng: np.random.Generator,
    stats: PlacementStats,
) -> np.ndarray | None:
    graph = constraint_graph(p)
    placed: dict[int, np.ndarray] = {}
    for vertex in order:
        point = _place_vertex(vertex, placed, set(graph.neighbors(vertex)), table, params, rng, stats)
        if point is None:
            stats.rejected_points += 1
            logger.debug("vertex %d could not be placed", vertex)
            return None
        placed[vertex] = point / np.linalg.norm(point)
    return np.stack([placed[v] for v in range(1, p.n + 1)])


def realized_angle_report(points: np.ndarray, p: FuncPair, table: AngleTable, delta: float) -> dict[str, Any]:
    """How closely unperturbed sphere points match the table, and the non-edge angle range."""
    unit = points / np.linalg.norm(points, axis=1, keepdims=True)
    angles = np.arccos(np.clip(unit @ unit.T, -1.0, 1.0))
    edge_error = 0.0
    nonedge: list[float] = []
    for i in range(1, p.n + 1):
        for j in range(i + 1, p.n + 1):
            realized = float(angles[i - 1, j - 1])
            if (i, j) in table:
                edge_error = max(edge_error, abs(realized - table[(i, j)]))
            else:
                nonedge.append(realized)
    low = min(nonedge) if nonedge else None
    high = max(nonedge) if nonedge else None
    nonedge_ok = not nonedge or (delta < low and high < math.pi - delta)
    return {
        "max_edge_error": edge_error,
        "min_nonedge_angle": low,
        "max_nonedge_angle": high,
        "ok": edge_error <= 1e-8 and nonedge_ok,
    }


def _perturb(
    config: PointConfig,
    margin: float,
    scale: float,
    rng: np.random.Generator,
    accept: Callable[[PointConfig], CertifyReport],
) -> PointConfig:
    if not margin > 0.0:
        raise ConstructionError(f"required inequalities are not strict (margin {margin!r})")
    k = config.k
    for attempt in range(SHRINK_BUDGET + 1):
        half_width = scale * margin / (2.0 * math.sqrt(k))
        noise = rng.uniform(-half_width, half_width, size=config.coords.shape)
        try:
            candidate = PointConfig(config.coords + noise)
        except PreconditionError:
            scale *= 0.5
            continue
        if accept(candidate).ok:
            if attempt:
                logger.debug("perturbation accepted after %d halvings", attempt)
            return candidate
        scale *= 0.5
    raise ShrinkBudgetError("perturbation did not produce distinct distances")


def perturb_distinct(
    config: PointConfig,
    p: FuncPair,
    scale: float = 1e-6,
    rng: np.random.Generator | None = None,
) -> PointConfig:
    """Jitter each point by at most scale * margin / 2 until every distance is distinct."""
    if not 0.0 < scale < 0.5:
        raise PreconditionError(f"scale must lie in (0, 1/2), got {scale!r}")
    rng = rng if rng is not None else make_rng(0)
    margin = pair_margin(distances(config), p)
    return _perturb(config, margin, scale, rng, lambda c: certify(c, p))


def perturb_farthest(
    config: PointConfig,
    g: FuncMap,
    scale: float = 0.1,
    rng: np.random.Generator | None = None,
) -> PointConfig:
    if not 0.0 < scale < 0.5:
        raise PreconditionError(f"scale must lie in (0, 1/2), got {scale!r}")
    rng = rng if rng is not None else make_rng(0)
    margin = farthest_margin(distances(config), g)
    return _perturb(config, margin, scale, rng, lambda c: certify_farthest(c, g))


def spherical_embed(
    p: FuncPair,
    params: EmbedParams,
    stats: PlacementStats | None = None,
) -> PointConfig | None:
    """Points near S^{k-1} realizing the pair, or None when the sampling budget runs out."""
    require_nice(p)
    stats = stats if stats is not None else PlacementStats()
    table = angle_table(p, params.alpha_const)
    order = elimination_order(p)

    for restart in range(params.max_restarts):
        stats.restarts = restart + 1
        rng = make_rng(params.seed, restart)
        points = _place_all(p, order, table, params, rng, stats)
        if points is None:
            logger.info("restart %d/%d: sampling budget exhausted", restart + 1, params.max_restarts)
            continue

        report = realized_angle_report(points, p, table, params.delta)
        stats.extra["angles"] = report
        if not report["ok"]:
            raise ConstructionError(f"placed points miss their prescribed angles: {report}")
        config = perturb_distinct(PointConfig(points), p, params.perturb_scale, rng)
        logger.info("embedded n=%d in R^%d after %d restart(s)", p.n, params.k, restart + 1)
        return config
    return None
