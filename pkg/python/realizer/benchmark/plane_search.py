#!/usr/bin/env python3
"""
Planar realization search

Random-restart local search for points in R^2 whose nearest/farthest maps equal a given pair.
Candidates are scored in batches by a squared hinge loss on the required distance orderings and
the best of each batch is polished with L-BFGS-B. A certified hit is reported; for croft6 none
should ever appear, since that pair has no planar realization.

Usage:
    python tools/benchmark/plane_search.py
    python tools/benchmark/plane_search.py --instance data/instances/tri3.json --candidates 2000
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from scipy import optimize

from ..common.errors import PreconditionError
from ..common.jsonl import write_json
from ..common.paths import BENCHMARK_DIR, INSTANCE_DIR
from ..common.runtime import SeedLike, configure_logging, make_rng
from ..core.funcgraph import FuncPair
from ..core.verify import PointConfig, certify

logger = logging.getLogger(__name__)

OUTPUT_FILE = BENCHMARK_DIR / "plane_search.json"


@dataclass(frozen=True)
class PlaneSearchParams:
    candidates: int = 100_000
    batch_size: int = 2_000
    polish_per_batch: int = 2
    margin: float = 1e-3
    seed: SeedLike = "plane-search"

    def __post_init__(self) -> None:
        if self.candidates < 1 or self.batch_size < 1:
            raise PreconditionError("candidate and batch counts must be positive")
        if not 0 <= self.polish_per_batch <= self.batch_size:
            raise PreconditionError("polish_per_batch must lie in [0, batch_size]")
        if not self.margin > 0.0:
            raise PreconditionError("margin must be positive")


@dataclass
class PlaneSearchResult:
    candidates: int
    polished: int
    best_loss: float
    found: PointConfig | None

    def to_json(self) -> dict[str, Any]:
        return {
            "candidates": self.candidates,
            "polished": self.polished,
            "best_loss": self.best_loss,
            "found": None if self.found is None else self.found.coords.tolist(),
        }


def _masks(p: FuncPair) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    n = p.n
    nearest = p.f.zero_based()
    farthest = p.g.zero_based()
    others = ~np.eye(n, dtype=bool)
    below_nearest = others.copy()
    below_nearest[np.arange(n), nearest] = False
    above_farthest = others.copy()
    above_farthest[np.arange(n), farthest] = False
    return nearest, farthest, below_nearest, above_farthest


def ordering_loss(points: np.ndarray, p: FuncPair, margin: float) -> np.ndarray:
    """Squared hinge loss of each configuration in a (batch, n, 2) array.

    Distances are divided by the mean pairwise distance so the loss ignores scale.
    Zero loss means every row ordering holds with relative slack `margin`.
    """
    nearest, farthest, below_nearest, above_farthest = _masks(p)
    n = p.n
    diff = points[:, :, None, :] - points[:, None, :, :]
    d = np.sqrt(np.sum(diff * diff, axis=-1) + 1e-30)
    scale = d.sum(axis=(1, 2)) / (n * (n - 1))
    d = d / scale[:, None, None]

    rows = np.arange(n)
    d_near = d[:, rows, nearest][:, :, None]
    d_far = d[:, rows, farthest][:, :, None]
    low = np.where(below_nearest[None], np.maximum(0.0, d_near - d + margin), 0.0)
    high = np.where(above_farthest[None], np.maximum(0.0, d - d_far + margin), 0.0)
    return np.sum(low * low + high * high, axis=(1, 2))


def _certified(coords: np.ndarray, p: FuncPair) -> PointConfig | None:
    try:
        config = PointConfig(coords)
    except PreconditionError:
        return None
    return config if certify(config, p).ok else None


def _polish(start: np.ndarray, p: FuncPair, margin: float) -> tuple[np.ndarray, float]:
    shape = start.shape

    def objective(flat: np.ndarray) -> float:
        return float(ordering_loss(flat.reshape((1, *shape)), p, margin)[0])

    result = optimize.minimize(objective, start.ravel(), method="L-BFGS-B", options={"maxiter": 200})
    return result.x.reshape(shape), float(result.fun)


def plane_search(p: FuncPair, params: PlaneSearchParams | None = None) -> PlaneSearchResult:
    params = params or PlaneSearchParams()
    rng = make_rng(params.seed)
    best_loss = np.inf
    polished = 0
    seen = 0

    while seen < params.candidates:
        size = min(params.batch_size, params.candidates - seen)
        batch = rng.uniform(-1.0, 1.0, size=(size, p.n, 2))
        losses = ordering_loss(batch, p, params.margin)
        seen += size

        for index in np.argsort(losses)[: params.polish_per_batch]:
            coords, loss = _polish(batch[index], p, params.margin)
            polished += 1
            best_loss = min(best_loss, loss, float(losses[index]))
            for candidate in (batch[index], coords):
                found = _certified(candidate, p)
                if found is not None:
                    logger.info("certified planar configuration after %d candidates", seen)
                    return PlaneSearchResult(seen, polished, float(best_loss), found)
        logger.debug("%d/%d candidates, best loss %.3e", seen, params.candidates, best_loss)

    return PlaneSearchResult(seen, polished, float(best_loss), None)


def main() -> None:
    import argparse

    from ..common.instances import load_instance

    parser = argparse.ArgumentParser(description="Search the plane for a realization of a pair")
    parser.add_argument("--instance", default=str(INSTANCE_DIR / "croft6.json"), help="Pair instance file")
    parser.add_argument("--candidates", type=int, default=PlaneSearchParams.candidates)
    parser.add_argument("--batch-size", type=int, default=PlaneSearchParams.batch_size)
    parser.add_argument("--polish", type=int, default=PlaneSearchParams.polish_per_batch)
    parser.add_argument("--seed", default=PlaneSearchParams.seed)
    parser.add_argument("--output", default=str(OUTPUT_FILE), help="Result JSON path")
    args = parser.parse_args()

    configure_logging()
    instance = load_instance(Path(args.instance))
    if instance.g is None:
        parser.error(f"{args.instance} is not a pair instance")
    p = FuncPair.of(instance.f, instance.g)
    params = PlaneSearchParams(
        candidates=args.candidates,
        batch_size=args.batch_size,
        polish_per_batch=args.polish,
        seed=args.seed,
    )

    started = time.perf_counter()
    print(f"Searching {params.candidates} planar configurations for {args.instance}", flush=True)
    result = plane_search(p, params)
    elapsed = time.perf_counter() - started

    print(f"  Candidates: {result.candidates}")
    print(f"  Polished:   {result.polished}")
    print(f"  Best loss:  {result.best_loss:.4e}")
    print(f"  Found:      {'yes' if result.found is not None else 'no'}")
    path = write_json(
        Path(args.output),
        {"instance": args.instance, "seconds": elapsed, "seed": str(args.seed), **result.to_json()},
    )
    print(f"\nDetailed results saved to: {path}", flush=True)


if __name__ == "__main__":
    main()
