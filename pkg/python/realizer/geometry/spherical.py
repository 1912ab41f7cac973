"""Cap areas on unit spheres, intersections of cap boundaries, and sampling on them.

`cap_area(d, phi)` is the area of a cap of angular radius `phi` on the d-sphere S^d in R^{d+1}.
Areas are computed in log space so very high dimensions do not underflow.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate, linalg
from scipy.special import gammaln

from ..common.errors import ConstructionError, PreconditionError


logger = logging.getLogger(__name__)

ALPHA = 1.0 / 500.0
MIN_DIMENSION = 9
MAX_SPAN_VECTORS = 7
DEFAULT_MAX_ATTEMPTS = 10_000
UNIT_TOLERANCE = 1e-12
RESIDUAL_TOLERANCE = 1e-9
_SAMPLE_BATCH = 256


@dataclass(frozen=True, eq=False)
class SphereCap:
    center: np.ndarray
    angle: float

    def __post_init__(self) -> None:
        center = np.asarray(self.center, dtype=float)
        if center.ndim != 1:
            raise PreconditionError("cap center must be a vector")
        if abs(float(np.linalg.norm(center)) - 1.0) > UNIT_TOLERANCE:
            raise PreconditionError(f"cap center has norm {np.linalg.norm(center)!r}")
        if not 0.0 < self.angle < math.pi:
            raise PreconditionError(f"cap angle {self.angle!r} outside (0, pi)")
        object.__setattr__(self, "center", center)

    @property
    def k(self) -> int:
        return int(self.center.shape[0])

    def contains(self, x: np.ndarray) -> bool:
        return float(np.dot(x, self.center)) >= math.cos(self.angle)


@dataclass(frozen=True, eq=False)
class BoundarySphere:
    """offset + radius * (unit vector in the column span of basis)."""

    offset: np.ndarray
    basis: np.ndarray
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0.0:
            raise PreconditionError(f"boundary sphere radius {self.radius!r} is not positive")
        if self.basis.shape[1] < 1:
            raise PreconditionError("boundary sphere has an empty basis")

    @classmethod
    def whole(cls, k: int) -> BoundarySphere:
        return cls(offset=np.zeros(k), basis=np.eye(k), radius=1.0)

    @property
    def k(self) -> int:
        return int(self.offset.shape[0])

    @property
    def dim(self) -> int:
        """Dimension of the sphere itself."""
        return int(self.basis.shape[1]) - 1

    def point(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        return self.offset + self.radius * (self.basis @ (u / np.linalg.norm(u)))

    def sample(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Uniform points, via normalised Gaussian directions in basis coordinates."""
        if size is None:
            return self.point(rng.standard_normal(self.basis.shape[1]))
        directions = rng.standard_normal((size, self.basis.shape[1]))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        return self.offset[None, :] + self.radius * directions @ self.basis.T


def _check_sphere_dim(d: int) -> None:
    if d < 1:
        raise PreconditionError(f"sphere dimension must be at least 1, got {d}")


def log_full_area(d: int) -> float:
    _check_sphere_dim(d)
    return math.log(2.0) + 0.5 * (d + 1) * math.log(math.pi) - float(gammaln(0.5 * (d + 1)))


def full_area(d: int) -> float:
    return math.exp(log_full_area(d))


def _log_sine_integral(power: int, phi: float) -> float:
    """log of the integral of sin^power over [0, phi] for 0 < phi <= pi/2."""
    if power == 0:
        return math.log(phi)
    peak = math.log(math.sin(phi))

    def scaled(theta: float) -> float:
        s = math.sin(theta)
        if s <= 0.0:
            return 0.0
        return math.exp(power * (math.log(s) - peak))

    value, _ = integrate.quad(scaled, 0.0, phi, epsabs=1e-14, epsrel=1e-12, limit=200)
    return power * peak + math.log(value)


def _log_sine_integral_pi(power: int) -> float:
    # integral of sin^power over [0, pi] = sqrt(pi) Gamma((power+1)/2) / Gamma(power/2 + 1)
    return 0.5 * math.log(math.pi) + float(gammaln(0.5 * (power + 1)) - gammaln(0.5 * power + 1))


def log_cap_area(d: int, phi: float) -> float:
    _check_sphere_dim(d)
    if not 0.0 <= phi <= math.pi:
        raise PreconditionError(f"cap angle {phi!r} outside [0, pi]")
    if phi == 0.0:
        return -math.inf
    power = d - 1
    whole = _log_sine_integral_pi(power)
    if phi <= 0.5 * math.pi:
        partial = _log_sine_integral(power, phi)
    elif phi >= math.pi:
        partial = whole
    else:
        rest = _log_sine_integral(power, math.pi - phi)
        partial = whole + math.log1p(-math.exp(rest - whole))
    log_equator = math.log(2.0) + 0.5 * d * math.log(math.pi) - float(gammaln(0.5 * d))
    return log_equator + partial


def cap_area(d: int, phi: float) -> float:
    return math.exp(log_cap_area(d, phi))


def cap_ratio_bounds(phi1: float, phi2: float, k: int) -> tuple[float, float]:
    """Closed-form bracket for cap_area(k-1, phi1) / cap_area(k-1, phi2)."""
    if not 0.0 < phi1 < phi2 <= 0.5 * math.pi:
        raise PreconditionError(f"need 0 < phi1 < phi2 <= pi/2, got {phi1!r}, {phi2!r}")
    if k < 3:
        raise PreconditionError(f"k must be at least 3, got {k}")
    power = k - 2
    log_lower = (
        math.log(phi1) + power * math.log(math.sin(0.5 * phi1))
        - math.log(2.0 * phi2) - power * math.log(math.sin(phi2))
    )
    gap = phi2 - phi1
    if gap <= 0.0:
        return math.exp(log_lower), math.inf
    log_upper = (
        math.log(2.0 * phi1) + power * math.log(math.sin(phi1))
        - math.log(gap) - power * math.log(math.sin(0.5 * (phi1 + phi2)))
    )
    return math.exp(log_lower), math.exp(log_upper)


def cap_fraction_bound(dim: int, alpha: float = ALPHA) -> float:
    """Share of a dim-sphere covered by a cap of angle arccos((alpha - 128 alpha^2) / 2)."""
    beta = math.acos((alpha - 128.0 * alpha * alpha) / 2.0)
    return math.exp(log_cap_area(dim, beta) - log_full_area(dim))


def span_norm_bound(s: int, alpha: float) -> float:
    return s * alpha / (1.0 - (s - 1) * alpha)


def solve_span(
    vs: Sequence[np.ndarray] | np.ndarray,
    targets: Sequence[float] | np.ndarray,
    alpha: float = ALPHA,
    max_vectors: int = MAX_SPAN_VECTORS,
) -> np.ndarray:
    """The unique v in span(vs) with v . vs[i] = targets[i]."""
    V = np.atleast_2d(np.asarray(vs, dtype=float))
    a = np.asarray(targets, dtype=float).reshape(-1)
    s, k = V.shape
    if not 1 <= s <= max_vectors:
        raise PreconditionError(f"expected 1..{max_vectors} vectors, got {s}")
    if a.shape[0] != s:
        raise PreconditionError(f"{s} vectors but {a.shape[0]} targets")
    if k < s:
        raise PreconditionError(f"{s} vectors cannot be independent in dimension {k}")
    if not 0.0 < alpha < 0.01:
        raise PreconditionError(f"alpha must lie in (0, 1/100), got {alpha!r}")
    norms = np.linalg.norm(V, axis=1)
    if np.any(np.abs(norms - 1.0) > RESIDUAL_TOLERANCE):
        raise PreconditionError("span vectors must be unit length")
    gram = V @ V.T
    off = gram - np.diag(np.diag(gram))
    if np.any(np.abs(off) > alpha):
        raise PreconditionError(f"span vectors have |dot product| above {alpha!r}")
    if np.any(np.abs(a) > alpha):
        raise PreconditionError(f"targets have magnitude above {alpha!r}")

    try:
        coefficients = linalg.solve(gram, a, assume_a="pos")
    except linalg.LinAlgError as exc:
        raise ConstructionError(f"span system is singular: {exc}") from exc
    v = coefficients @ V

    residual = float(np.max(np.abs(V @ v - a)))
    if residual > RESIDUAL_TOLERANCE:
        raise ConstructionError(f"span solve residual {residual:.3e}")
    bound = span_norm_bound(s, alpha)
    if np.linalg.norm(v) > bound * (1.0 + 1e-12):
        raise ConstructionError(f"span solution norm {np.linalg.norm(v):.3e} exceeds {bound:.3e}")
    return v


def boundary_intersection(
    caps: Sequence[SphereCap],
    k: int,
    alpha: float = ALPHA,
    max_vectors: int = MAX_SPAN_VECTORS,
) -> BoundarySphere:
    """Intersection of the cap boundaries, a lower-dimensional sphere."""
    if k < MIN_DIMENSION:
        raise PreconditionError(f"k must be at least {MIN_DIMENSION}, got {k}")
    if not caps:
        return BoundarySphere.whole(k)
    for cap in caps:
        if cap.k != k:
            raise PreconditionError(f"cap lives in dimension {cap.k}, expected {k}")

    centers = np.stack([cap.center for cap in caps])
    targets = np.array([math.cos(cap.angle) for cap in caps])
    offset = solve_span(centers, targets, alpha=alpha, max_vectors=max_vectors)
    radius_sq = 1.0 - float(np.dot(offset, offset))
    if radius_sq <= 0.0:
        raise ConstructionError("cap boundaries do not meet")
    basis = linalg.null_space(centers)
    if basis.shape[1] != k - len(caps):
        raise ConstructionError(f"cap centers have rank below {len(caps)}")
    return BoundarySphere(offset=offset, basis=basis, radius=math.sqrt(radius_sq))


def sample_on(
    boundary: BoundarySphere,
    forbidden: Sequence[SphereCap],
    rng: np.random.Generator,
    max_attempts: int = DEFAULT_MAX_ATTEMPTS,
) -> np.ndarray | None:
    """Rejection-sample a boundary point outside every forbidden cap, or None."""
    if forbidden:
        centers = np.stack([cap.center for cap in forbidden])
        limits = np.array([math.cos(cap.angle) for cap in forbidden])
    attempts = 0
    while attempts < max_attempts:
        size = min(_SAMPLE_BATCH, max_attempts - attempts)
        candidates = boundary.sample(rng, size=size)
        candidates /= np.linalg.norm(candidates, axis=1, keepdims=True)
        if not forbidden:
            return candidates[0]
        clear = np.all(candidates @ centers.T < limits[None, :], axis=1)
        hits = np.flatnonzero(clear)
        if hits.size:
            logger.debug("boundary sample accepted after %d draws", attempts + int(hits[0]) + 1)
            return candidates[hits[0]]
        attempts += size
    logger.debug("boundary sampling exhausted %d draws against %d caps", max_attempts, len(forbidden))
    return None
