"""Farthest-point realizations in the plane.

Shallow shadow components are built on the ellipse x^2 + 4y^2 = 4 with their 2-cycle at (-2, 0)
and (2, 0). Level i of a component sits near a parameter b_i, where b_{i-1} = m(b_i) and Q_{m(b)}
is the unique farthest ellipse point from P_b. The level parameters shrink by roughly a factor of
7 per level, so this construction runs out of float64 precision around ten levels.

Deeper components use a diameter layout instead: every vertex sits close to one end of the
diameter (-2, 0)-(2, 0) at an integer angular offset x and a radial weight w. For a small angle
scale sigma the farthest point of v is, up to O(sigma^4), the opposite-end u minimising
4 * w_u + (x_u - x_v)^2. Offsets and weights are chosen so that this minimiser is g(v) with a
gap of at least 1, which float64 resolves at any depth a forest on a few hundred points reaches.

Components are then scaled onto distinct diameters of the unit circle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize

from ..common.errors import ConstructionError, NotNiceError, PreconditionError, ShrinkBudgetError
from ..common.runtime import SeedLike, make_rng
from ..core.funcgraph import FuncMap, components, level_partition, split_sides, twocycles
from ..core.realize import single_report
from ..core.verify import PointConfig, certify_farthest, distances, farthest_margin
from .embed import perturb_farthest


logger = logging.getLogger(__name__)

B_MAX = 1.0 / 3.0
CANONICAL_A = np.array([-2.0, 0.0])
CANONICAL_B = np.array([2.0, 0.0])
ROOT_XTOL = 1e-15
ELLIPSE_MAX_DEPTH = 6


def _check_b(b: float) -> None:
    if not 0.0 < b < B_MAX:
        raise PreconditionError(f"ellipse parameter {b!r} outside (0, 1/3)")


def _check_y(y: float) -> None:
    if not 0.0 < y < 1.0:
        raise PreconditionError(f"ellipse height {y!r} outside (0, 1)")


def point_p(b: float) -> np.ndarray:
    return np.array([-2.0 * math.sqrt(1.0 - b * b), -b])


def point_q(y: float) -> np.ndarray:
    return np.array([2.0 * math.sqrt(1.0 - y * y), y])


def point_r(b: float) -> np.ndarray:
    return np.array([-2.0 * math.sqrt(1.0 - b * b), b])


def point_s(b: float) -> np.ndarray:
    return np.array([2.0 * math.sqrt(1.0 - b * b), -b])


@dataclass(frozen=True)
class EllipseParam:
    b: float

    def __post_init__(self) -> None:
        _check_b(self.b)

    @property
    def p(self) -> np.ndarray:
        return point_p(self.b)

    @property
    def q(self) -> np.ndarray:
        return point_q(self.b)

    @property
    def r(self) -> np.ndarray:
        return point_r(self.b)

    @property
    def s(self) -> np.ndarray:
        return point_s(self.b)


def g_b(b: float, y: float) -> float:
    """Squared distance |P_b Q_y|^2."""
    _check_b(b)
    _check_y(y)
    return 4.0 * (math.sqrt(1.0 - y * y) + math.sqrt(1.0 - b * b)) ** 2 + (y + b) ** 2


def g_b_prime(b: float, y: float) -> float:
    _check_b(b)
    _check_y(y)
    return -6.0 * y - 8.0 * y * math.sqrt(1.0 - b * b) / math.sqrt(1.0 - y * y) + 2.0 * b


def h_b(b: float, y: float) -> float:
    return (3.0 * y - b) ** 2 * (1.0 - y * y) / (y * y)


def _mb_ratio(b: float) -> float:
    """m_b / b, solved in the scaled variable u = y / b which stays near 1/7."""

    def residual(u: float) -> float:
        return (3.0 * u - 1.0) ** 2 * (1.0 - (b * u) ** 2) / (u * u) - 16.0 * (1.0 - b * b)

    return optimize.brentq(residual, 1e-6, 1.0 / 3.0, xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps)


def solve_mb(b: float) -> float:
    """The height of the farthest ellipse point from P_b."""
    _check_b(b)
    return b * _mb_ratio(b)


def mb_supremum() -> float:
    return B_MAX * _mb_ratio(B_MAX)


def farthest_param_inverse(y_target: float) -> float:
    """The b with m_b = y_target."""
    top = mb_supremum()
    if not 0.0 < y_target < top:
        raise PreconditionError(f"{y_target!r} is outside the range (0, {top:.6g}) of b -> m_b")
    lo = 3.0 * y_target
    return optimize.brentq(
        lambda b: b * _mb_ratio(b) - y_target,
        lo,
        B_MAX,
        xtol=ROOT_XTOL,
        rtol=4 * np.finfo(float).eps,
    )


def anchor_param(eps: float) -> float:
    """Largest b up to 0.25 with |P_b - (-2, 0)| <= eps."""
    if eps <= 0.0:
        raise PreconditionError(f"eps must be positive, got {eps!r}")
    cap = 0.25

    def gap(b: float) -> float:
        return float(np.linalg.norm(point_p(b) - CANONICAL_A)) - eps

    if gap(cap) <= 0.0:
        return cap
    return optimize.brentq(gap, 1e-300, cap, xtol=ROOT_XTOL)


@dataclass(frozen=True)
class MaxRealParams:
    seed: SeedLike = 0
    initial_eps: float | None = None
    initial_spread: float = 0.1
    shrink_factor: float = 0.5
    shrink_budget: int = 40
    perturb_scale: float = 0.1
    ellipse_max_depth: int = ELLIPSE_MAX_DEPTH

    def __post_init__(self) -> None:
        if self.ellipse_max_depth < 0:
            raise PreconditionError("ellipse_max_depth must be non-negative")
        if not 0.0 < self.shrink_factor < 1.0:
            raise PreconditionError("shrink_factor must lie in (0, 1)")
        if not 0.0 < self.initial_spread <= 0.25:
            raise PreconditionError("initial_spread must lie in (0, 1/4]")
        if self.initial_eps is not None and self.initial_eps <= 0.0:
            raise PreconditionError("initial_eps must be positive")
        if not 0.0 < self.perturb_scale < 0.5:
            raise PreconditionError("perturb_scale must lie in (0, 1/2)")


@dataclass(frozen=True)
class ComponentPlan:
    vertices: tuple[int, ...]
    two_cycle: tuple[int, int]
    side_a: frozenset[int]
    side_b: frozenset[int]
    levels: tuple[float, ...]
    spread: float
    anchors: tuple[tuple[float, float], tuple[float, float]]
    eps: float

    def __post_init__(self) -> None:
        for upper, lower in zip(self.levels[1:], self.levels):
            if not lower < upper:
                raise ConstructionError("level parameters must increase with depth")
        if any(not 0.0 < b < B_MAX for b in self.levels):
            raise ConstructionError("level parameters left (0, 1/3)")
        if not self.spread > 0.0:
            raise ConstructionError("spread must be positive")


def level_params(depth: int, eps_canonical: float) -> tuple[float, ...]:
    """(b_1, ..., b_depth) with b_{i-1} = m(b_i) and the deepest level within eps of the anchor."""
    if depth == 0:
        return ()
    chain = [anchor_param(0.5 * eps_canonical)]
    for _ in range(depth - 1):
        chain.append(solve_mb(chain[-1]))
    return tuple(reversed(chain))


def _shape(side_a: bool, level: int) -> Callable[[float], np.ndarray]:
    if side_a:
        return point_q if level % 2 else point_p
    return point_r if level % 2 else point_s


def _spread_offsets(count: int) -> np.ndarray:
    return (np.arange(count) - 0.5 * (count - 1)) / count


def _place_side(
    g: FuncMap,
    side: frozenset[int],
    root: int,
    side_a: bool,
    levels: tuple[float, ...],
    level_of: Callable[[int], int],
    spread: float,
    coords: dict[int, np.ndarray],
) -> None:
    children: dict[int, list[int]] = {}
    for v in sorted(side):
        if v != root:
            children.setdefault(g(v), []).append(v)

    params: dict[int, float] = {}
    frontier = [root]
    depth = 0
    while frontier:
        depth += 1
        groups = [(parent, children.get(parent, [])) for parent in frontier]
        groups = [(parent, kids) for parent, kids in groups if kids]
        if not groups:
            break
        if depth == 1:
            centres = {root: levels[0]}
        else:
            centres = {parent: farthest_param_inverse(params[parent]) for parent, _ in groups}
        values = sorted(centres.values())
        gaps = [hi - lo for lo, hi in zip(values, values[1:])]
        width = spread * min(gaps + [levels[depth - 1]])
        shape = _shape(side_a, depth)
        next_frontier = []
        for parent, kids in groups:
            for kid, offset in zip(kids, _spread_offsets(len(kids))):
                if level_of(kid) != depth:
                    raise ConstructionError(f"vertex {kid} is not at level {depth}")
                params[kid] = centres[parent] + width * offset
                coords[kid] = shape(params[kid])
                next_frontier.append(kid)
        frontier = next_frontier


def _similarity(points: np.ndarray, anchor_a: np.ndarray, anchor_b: np.ndarray) -> np.ndarray:
    """Map (-2, 0) -> anchor_a and (2, 0) -> anchor_b by rotation, scaling and translation."""
    z = points[:, 0] + 1j * points[:, 1]
    a = complex(*anchor_a)
    b = complex(*anchor_b)
    w = a + (z + 2.0) * (b - a) / 4.0
    return np.column_stack([w.real, w.imag])


def _component_cycle(g: FuncMap) -> tuple[int, int]:
    cycles = twocycles(g)
    if len(cycles) != 1 or len(components(g)) != 1:
        raise PreconditionError("component must be connected with exactly one 2-cycle")
    return cycles[0]


def _anchor_span(anchors: tuple[np.ndarray, np.ndarray], eps: float) -> float:
    anchor_a, anchor_b = (np.asarray(x, dtype=float) for x in anchors)
    span = float(np.linalg.norm(anchor_b - anchor_a))
    if span == 0.0:
        raise PreconditionError("anchors must be distinct")
    if not eps > 0.0:
        raise PreconditionError(f"eps must be positive, got {eps!r}")
    return span


def plan_component(g: FuncMap, anchors: tuple[np.ndarray, np.ndarray], eps: float, spread: float) -> ComponentPlan:
    a0, b0 = _component_cycle(g)
    side_a, side_b = split_sides(g, a0, b0)
    eps_canonical = eps * 4.0 / _anchor_span(anchors, eps)
    anchor_a, anchor_b = (np.asarray(x, dtype=float) for x in anchors)
    depth = level_partition(g).m
    return ComponentPlan(
        vertices=tuple(g.vertices()),
        two_cycle=(a0, b0),
        side_a=side_a,
        side_b=side_b,
        levels=level_params(depth, eps_canonical),
        spread=spread,
        anchors=(tuple(anchor_a), tuple(anchor_b)),
        eps=eps,
    )


def _build(g: FuncMap, plan: ComponentPlan) -> np.ndarray:
    a0, b0 = plan.two_cycle
    levels = level_partition(g)
    coords: dict[int, np.ndarray] = {a0: CANONICAL_A.copy(), b0: CANONICAL_B.copy()}
    _place_side(g, plan.side_a, a0, True, plan.levels, levels.of, plan.spread, coords)
    _place_side(g, plan.side_b, b0, False, plan.levels, levels.of, plan.spread, coords)
    canonical = np.stack([coords[v] for v in g.vertices()])
    anchor_a, anchor_b = (np.array(x) for x in plan.anchors)
    return _similarity(canonical, anchor_a, anchor_b)


def _certified_piece(coords: np.ndarray, g: FuncMap) -> PointConfig | None:
    try:
        config = PointConfig(coords)
    except PreconditionError:
        return None
    if farthest_margin(distances(config), g) > 0.0:
        return config
    return None


def realize_component(
    g: FuncMap,
    anchors: tuple[np.ndarray, np.ndarray],
    eps: float,
    params: MaxRealParams | None = None,
) -> PointConfig:
    """Points for one connected component, each within eps of an anchor, with farthest map g.

    Distances may tie across the two mirror-image sides; `max_realize` breaks those ties.
    Raises ShrinkBudgetError when no spread within the budget gives a valid configuration.
    """
    params = params or MaxRealParams()
    _component_cycle(g)
    _anchor_span(anchors, eps)
    spread = params.initial_spread
    for attempt in range(params.shrink_budget + 1):
        try:
            coords = _build(g, plan_component(g, anchors, eps, spread))
        except (PreconditionError, ConstructionError) as exc:
            logger.debug("ellipse plan failed at spread %.3g: %s", spread, exc)
            coords = None
        config = None if coords is None else _certified_piece(coords, g)
        if config is not None:
            logger.debug("component of %d points built with spread %.3g", g.n, spread)
            return config
        spread *= params.shrink_factor
        logger.debug("component spread shrunk to %.3g (attempt %d)", spread, attempt + 1)
    raise ShrinkBudgetError(f"component of {g.n} points not realized within the shrink budget")


@dataclass(frozen=True)
class DiameterLayout:
    """Ends, angular offsets and radial weights of one component around a diameter.

    End -1 is the (-2, 0) end and end +1 the (2, 0) end. At angle scale sigma a vertex sits at
    end * 2 * (1 - sigma^2 * w) * (cos(sigma * x), sin(sigma * x)).
    """

    end: tuple[int, ...]
    offset: tuple[float, ...]
    weight: tuple[float, ...]

    @property
    def n(self) -> int:
        return len(self.end)

    @property
    def extent(self) -> float:
        return max([1.0] + [abs(x) for x in self.offset])

    def score(self, v: int, u: int) -> float:
        return 4.0 * self.weight[u - 1] + (self.offset[u - 1] - self.offset[v - 1]) ** 2

    def model_farthest(self) -> tuple[FuncMap, float]:
        """The small-angle farthest choice of every vertex and the smallest gap to a runner-up."""
        image = []
        margin = math.inf
        for v in range(1, self.n + 1):
            ranked = sorted(
                (self.score(v, u), u) for u in range(1, self.n + 1) if self.end[u - 1] != self.end[v - 1]
            )
            image.append(ranked[0][1])
            if len(ranked) > 1:
                margin = min(margin, ranked[1][0] - ranked[0][0])
        return FuncMap(tuple(image)), margin

    def coords(self, sigma: float) -> np.ndarray:
        angle = sigma * np.asarray(self.offset, dtype=float)
        radius = 2.0 * (1.0 - sigma * sigma * np.asarray(self.weight, dtype=float))
        sign = np.asarray(self.end, dtype=float)
        return np.column_stack([sign * radius * np.cos(angle), sign * radius * np.sin(angle)])


def diameter_layout(g: FuncMap) -> DiameterLayout:
    """Lay out one component so that its small-angle farthest choices reproduce g with gap >= 1."""
    a0, b0 = _component_cycle(g)
    side_a, _ = split_sides(g, a0, b0)
    preimages: dict[int, list[int]] = {v: [] for v in g.vertices()}
    for v in g.vertices():
        preimages[g(v)].append(v)

    # rows[root][j] lists level-j vertices of one side, siblings grouped in their parents' order
    rows: dict[int, list[list[int]]] = {}
    for root in (a0, b0):
        row, table = [root], []
        while row:
            table.append(row)
            row = [kid for parent in row for kid in preimages[parent] if kid not in (a0, b0)]
        rows[root] = table

    end = [0] * g.n
    offset = [0.0] * g.n
    start = 1.0
    for level in range(max(len(rows[a0]), len(rows[b0]))):
        width = 0
        for root in (a0, b0):
            if level >= len(rows[root]):
                continue
            row = rows[root][level]
            width = max(width, len(row))
            for rank, v in enumerate(row):
                near_a = (v in side_a) == (level % 2 == 0)
                end[v - 1] = -1 if near_a else 1
                offset[v - 1] = 0.0 if level == 0 else start + rank
        if level > 0:
            start += width + 1

    weight = [0.0] * g.n
    for side in (-1, 1):
        members = [v for v in g.vertices() if end[v - 1] == side]
        sites = sorted((v for v in members if preimages[v]), key=lambda v: offset[v - 1])
        for left, right in zip(sites, sites[1:]):
            hi = max(offset[u - 1] for u in preimages[left])
            lo = min(offset[u - 1] for u in preimages[right])
            if not hi < lo:
                raise ConstructionError(f"preimages of {left} and {right} overlap on the diameter")
            boundary = 0.5 * (hi + lo)
            step = (boundary - offset[left - 1]) ** 2 - (boundary - offset[right - 1]) ** 2
            weight[right - 1] = weight[left - 1] + step / 4.0
        opposite = [u for u in g.vertices() if end[u - 1] != side]
        envelope = max(4.0 * weight[g(u) - 1] + (offset[u - 1] - offset[g(u) - 1]) ** 2 for u in opposite)
        for v in members:
            if not preimages[v]:
                weight[v - 1] = (envelope + 1.0) / 4.0
    return DiameterLayout(end=tuple(end), offset=tuple(offset), weight=tuple(weight))


def realize_component_on_circle(
    g: FuncMap,
    anchors: tuple[np.ndarray, np.ndarray],
    eps: float,
    params: MaxRealParams | None = None,
) -> PointConfig:
    """Points for one component via the diameter layout, each within eps of an anchor."""
    params = params or MaxRealParams()
    layout = diameter_layout(g)
    span = _anchor_span(anchors, eps)
    anchor_a, anchor_b = (np.asarray(x, dtype=float) for x in anchors)
    eps_canonical = eps * 4.0 / span
    extent = layout.extent
    sigma = min(eps_canonical / (4.0 * extent), 0.25 / (extent * extent))
    for attempt in range(params.shrink_budget + 1):
        coords = _similarity(layout.coords(sigma), anchor_a, anchor_b)
        reach = max(min(np.linalg.norm(p - anchor_a), np.linalg.norm(p - anchor_b)) for p in coords)
        config = _certified_piece(coords, g) if reach <= eps else None
        if config is not None:
            logger.debug("component of %d points laid on a diameter with sigma %.3g", g.n, sigma)
            return config
        sigma *= params.shrink_factor
        logger.debug("diameter layout sigma shrunk to %.3g (attempt %d)", sigma, attempt + 1)
    raise ShrinkBudgetError(f"diameter layout of {g.n} points not certified within the shrink budget")


def _realize_part(
    g: FuncMap,
    anchors: tuple[np.ndarray, np.ndarray],
    eps: float,
    params: MaxRealParams,
) -> PointConfig:
    depth = level_partition(g).m
    if depth <= params.ellipse_max_depth:
        try:
            return realize_component(g, anchors, eps, params)
        except ShrinkBudgetError as exc:
            logger.info("ellipse construction gave up at depth %d (%s), using the diameter layout", depth, exc)
    return realize_component_on_circle(g, anchors, eps, params)


def diameter_anchors(s: int) -> list[tuple[np.ndarray, np.ndarray]]:
    anchors = []
    for i in range(s):
        theta = i * math.pi / s + math.pi / (4 * s)
        a = np.array([math.cos(theta), math.sin(theta)])
        anchors.append((a, -a))
    return anchors


def max_realize(g: FuncMap, params: MaxRealParams | None = None) -> PointConfig:
    """Points in the plane whose farthest-point map is g, with distinct distances.

    Components of depth at most `params.ellipse_max_depth` are tried on the ellipse first; deeper
    ones, and any the ellipse cannot certify, use the diameter layout. Raises ShrinkBudgetError
    when the components keep interfering at every eps within the budget.
    """
    params = params or MaxRealParams()
    report = single_report(g)
    if not report.is_nice:
        raise NotNiceError(f"map is not max-realizable: {report.violations[0]}", report=report)

    parts = components(g)
    anchors = diameter_anchors(len(parts))
    eps = params.initial_eps if params.initial_eps is not None else 1.0 / (8 * len(parts))

    for attempt in range(params.shrink_budget + 1):
        coords = np.zeros((g.n, 2))
        for vertices, anchor_pair in zip(parts, anchors):
            piece = _realize_part(g.restrict(vertices), anchor_pair, eps, params)
            coords[np.asarray(vertices) - 1] = piece.coords
        config = _certified_piece(coords, g)
        if config is not None:
            break
        eps *= params.shrink_factor
        logger.info("cross-component check failed, eps shrunk to %.3g", eps)
    else:
        raise ShrinkBudgetError("components interfere at every eps within the shrink budget")

    rng = make_rng(params.seed)
    result = perturb_farthest(config, g, params.perturb_scale, rng)
    final = certify_farthest(result, g)
    if not final.ok:
        raise ConstructionError(f"planar realization does not certify: {final.to_json()}")
    logger.info("max-realized n=%d with %d component(s), eps=%.3g", g.n, len(parts), eps)
    return result
