"""Closed-form size bounds for realizations in R^k."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any

from ..common.errors import PreconditionError
from ..core.funcgraph import FuncMap
from .spherical import ALPHA, cap_area, full_area, log_cap_area, log_full_area


PACKING_ANGLE = math.acos(2.0 / 3.0) / 2.0
KISSING_ANGLE = math.pi / 6.0
UPPER_EPSILON = math.sin(math.pi / 12.0)
UPPER_MIN_K = 4


def lower_constants(alpha: float = ALPHA) -> tuple[float, float, float]:
    """(beta, c, A) of the exponential lower bound n < A c^k + 1."""
    beta = math.acos((alpha - 128.0 * alpha * alpha) / 2.0)
    mid = 0.5 * (0.5 * math.pi + beta)
    c = math.sin(mid) / math.sin(beta)
    a = (0.5 * math.pi - beta) * math.sin(beta) ** 10 / (2.0 * beta * math.sin(mid) ** 10)
    return beta, c, a


@dataclass(frozen=True)
class BoundsReport:
    k: int
    upper_m: float | None
    lower_A: float
    lower_c: float
    lower_n: float
    pack_Bk: float
    kissing: float

    def ball_bound(self, r: float) -> float:
        return ball_bound(r, self.k)

    def to_json(self) -> dict[str, Any]:
        document = asdict(self)
        document["lower_guarantee_vacuous"] = self.lower_n < 3.0
        return document


def upper_m(k: int) -> float:
    """1 + 1/(a e^k) with e = sin(pi/12) and a = 1/(6 e^3), i.e. 1 + 6 e^(3-k)."""
    if k < UPPER_MIN_K:
        raise PreconditionError(f"the upper bound needs k >= {UPPER_MIN_K}, got {k}")
    return 1.0 + 6.0 * UPPER_EPSILON ** (3 - k)


def pack_bk(k: int) -> float:
    """Number of disjoint caps of angle arccos(2/3)/2 that fit on S^{k-1}, as an area ratio."""
    return math.exp(log_full_area(k - 1) - log_cap_area(k - 1, PACKING_ANGLE))


def kissing_limit(k: int) -> float:
    """Area bound on how many points can share one nearest neighbour in R^k."""
    return full_area(k - 1) / cap_area(k - 1, KISSING_ANGLE)


def ball_bound(r: float, k: int) -> float:
    return (2.0 * r + 1.0) ** k


def union_bound_holds(n: int, k: int, alpha: float = ALPHA) -> bool:
    _, c, a = lower_constants(alpha)
    return n < a * c**k + 1.0


def indegree_obstruction(f: FuncMap, k: int) -> bool:
    """True when some vertex is the nearest neighbour of more points than R^k allows."""
    return max(f.in_degrees()) > kissing_limit(k)


def bounds(k: int, alpha: float = ALPHA) -> BoundsReport:
    if k < 2:
        raise PreconditionError(f"k must be at least 2, got {k}")
    _, c, a = lower_constants(alpha)
    return BoundsReport(
        k=k,
        upper_m=upper_m(k) if k >= UPPER_MIN_K else None,
        lower_A=a,
        lower_c=c,
        lower_n=a * c**k + 1.0,
        pack_Bk=pack_bk(k),
        kissing=kissing_limit(k),
    )
