#!/usr/bin/env python3
"""
Acceptance sweep

Runs the twelve acceptance checks (exhaustive oracle agreement, witness round trips, embeddings,
cap numerics, span solving, bounds, planar max-realizations, ellipse roots and the croft6
planar negative control) and writes one JSONL record per check plus a JSON summary.

Usage:
    python tools/validate/acceptance.py
    python tools/validate/acceptance.py --scale 0.1 --only 1 2 7 9
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterator

import numpy as np

from ..benchmark.plane_search import PlaneSearchParams, plane_search
from ..common.errors import ConstructionError, RealizerError
from ..common.jsonl import write_json, write_jsonl
from ..common.paths import BENCHMARK_DIR
from ..common.runtime import configure_logging, make_rng
from ..core.funcgraph import FuncPair
from ..core.realize import check, check_single, edge_labeling, labeling_inequalities, metric_witness
from ..core.verify import certify, certify_farthest, extract_maps, is_metric, oracle, oracle_single
from ..data.families import croft6, enumerate_maps, enumerate_pairs, random_forest_map, random_nice_pair
from ..geometry.bounds import pack_bk, upper_m
from ..geometry.embed import EmbedParams, simplex, spherical_embed
from ..geometry.maxreal2d import MaxRealParams, g_b, max_realize, solve_mb
from ..geometry.spherical import cap_area, cap_ratio_bounds, full_area, solve_span

logger = logging.getLogger(__name__)

RECORDS_FILE = BENCHMARK_DIR / "acceptance.jsonl"
SUMMARY_FILE = BENCHMARK_DIR / "acceptance_summary.json"
SPAN_ALPHA = 1.0 / 500.0


@dataclass
class CheckResult:
    criterion: int
    name: str
    total: int = 0
    failures: int = 0
    seconds: float = 0.0
    details: dict[str, Any] = field(default_factory=dict)
    examples: list[Any] = field(default_factory=list)
    min_pass_rate: float = 1.0
    vetoed: bool = False

    @property
    def passed(self) -> bool:
        if self.total == 0 or self.vetoed:
            return False
        return (self.total - self.failures) / self.total >= self.min_pass_rate

    def fail(self, example: Any) -> None:
        self.failures += 1
        if len(self.examples) < 5:
            self.examples.append(example)

    def to_json(self) -> dict[str, Any]:
        return {**asdict(self), "passed": self.passed}


def _count(base: int, scale: float) -> int:
    return max(1, int(round(base * scale)))


def check_pair_oracle(scale: float, seed: str) -> CheckResult:
    result = CheckResult(1, "pair oracle agreement")
    for n in (3, 4):
        for p in enumerate_pairs(n):
            result.total += 1
            if check(p).is_nice != oracle(p):
                result.fail({"f": list(p.f.image), "g": list(p.g.image)})
    return result


def check_single_oracle(scale: float, seed: str) -> CheckResult:
    result = CheckResult(2, "single map oracle agreement")
    for n in (3, 4):
        for f in enumerate_maps(n):
            result.total += 1
            expected = check_single(f)
            if not expected == oracle_single(f, "nearest") == oracle_single(f, "farthest"):
                result.fail({"f": list(f.image)})
    return result


def _witness_pairs(scale: float, seed: str) -> Iterator[FuncPair]:
    for index in range(_count(1000, scale)):
        rng = make_rng(seed, 3, index)
        yield random_nice_pair(int(rng.integers(3, 65)), rng)


def check_witnesses(scale: float, seed: str) -> CheckResult:
    result = CheckResult(3, "metric witness round trip")
    for p in _witness_pairs(scale, seed):
        result.total += 1
        d = metric_witness(p)
        maps = extract_maps(d)
        if not (maps.distinct and maps.nearest == p.f and maps.farthest == p.g and is_metric(d)):
            result.fail({"f": list(p.f.image), "g": list(p.g.image)})
    return result


def check_labeling(scale: float, seed: str) -> CheckResult:
    result = CheckResult(4, "labeling inequalities")
    for p in _witness_pairs(scale, seed):
        result.total += 1
        try:
            broken = labeling_inequalities(p, edge_labeling(p))
        except ConstructionError as exc:
            result.fail({"f": list(p.f.image), "g": list(p.g.image), "error": str(exc)})
            continue
        if broken:
            result.fail([v.to_json() for v in broken[:3]])
    return result


def check_simplex(scale: float, seed: str) -> CheckResult:
    result = CheckResult(5, "simplex embedding")
    for index in range(_count(200, scale)):
        rng = make_rng(seed, 5, index)
        p = random_nice_pair(int(rng.integers(3, 13)), rng)
        result.total += 1
        try:
            config = simplex(p)
        except RealizerError as exc:
            result.fail({"f": list(p.f.image), "g": list(p.g.image), "error": str(exc)})
            continue
        if not certify(config, p).ok:
            result.fail({"f": list(p.f.image), "g": list(p.g.image)})
    return result


def check_spherical(scale: float, seed: str) -> CheckResult:
    result = CheckResult(6, "spherical embedding", min_pass_rate=0.9)
    returned = 0
    uncertified = 0
    for index in range(_count(100, scale)):
        rng = make_rng(seed, 6, index)
        p = random_nice_pair(int(rng.integers(3, 11)), rng)
        result.total += 1
        config = spherical_embed(p, EmbedParams(k=12, seed=f"{seed}-{index}"))
        if config is None:
            result.fail({"f": list(p.f.image), "g": list(p.g.image), "status": "budget_exhausted"})
            continue
        returned += 1
        if not certify(config, p).ok:
            uncertified += 1
            result.fail({"f": list(p.f.image), "g": list(p.g.image), "status": "uncertified"})
    result.details = {"returned": returned, "uncertified": uncertified}
    result.vetoed = uncertified > 0
    return result


def check_caps(scale: float, seed: str) -> CheckResult:
    result = CheckResult(7, "cap numerics")
    result.total += 1
    if abs(cap_area(2, 0.5 * math.pi) - 2.0 * math.pi) > 1e-9:
        result.fail({"d": 2, "cap": cap_area(2, 0.5 * math.pi)})
    for d in range(1, 31):
        result.total += 1
        ratio = cap_area(d, 0.5 * math.pi) / full_area(d)
        if abs(ratio - 0.5) > 1e-9:
            result.fail({"d": d, "ratio": ratio})

    rng = make_rng(seed, 7)
    for _ in range(_count(1000, scale)):
        k = int(rng.integers(3, 41))
        phi2 = float(rng.uniform(0.05, 0.5 * math.pi))
        phi1 = float(rng.uniform(0.01, 0.99)) * phi2
        result.total += 1
        lower, upper = cap_ratio_bounds(phi1, phi2, k)
        ratio = cap_area(k - 1, phi1) / cap_area(k - 1, phi2)
        if not lower * (1.0 - 1e-9) <= ratio <= upper * (1.0 + 1e-9):
            result.fail({"phi1": phi1, "phi2": phi2, "k": k, "ratio": ratio, "bounds": [lower, upper]})
    return result


def near_orthogonal(rng: np.random.Generator, s: int, k: int, alpha: float) -> np.ndarray:
    """s unit vectors in R^k with pairwise |dot| below alpha."""
    basis, _ = np.linalg.qr(rng.standard_normal((k, s)))
    noise = rng.standard_normal((s, k))
    noise *= (0.25 * alpha) * rng.uniform(0.0, 1.0, size=(s, 1)) / np.linalg.norm(noise, axis=1, keepdims=True)
    vectors = basis.T + noise
    return vectors / np.linalg.norm(vectors, axis=1, keepdims=True)


def check_span(scale: float, seed: str) -> CheckResult:
    result = CheckResult(8, "span solver")
    rng = make_rng(seed, 8)
    for _ in range(_count(1000, scale)):
        s = int(rng.integers(1, 8))
        k = int(rng.integers(max(9, s), 41))
        vs = near_orthogonal(rng, s, k, SPAN_ALPHA)
        targets = rng.uniform(-SPAN_ALPHA, SPAN_ALPHA, size=s)
        result.total += 1
        v = solve_span(vs, targets, alpha=SPAN_ALPHA)
        residual = float(np.max(np.abs(vs @ v - targets)))
        if residual > 1e-9 or np.linalg.norm(v) > 8.0 * SPAN_ALPHA:
            result.fail({"s": s, "k": k, "residual": residual, "norm": float(np.linalg.norm(v))})
    return result


def check_bounds(scale: float, seed: str) -> CheckResult:
    result = CheckResult(9, "upper bound and packing figures")
    expected_m = 1.0 + 6.0 / math.sin(math.pi / 12.0)
    expected_pack = math.pi / (math.acos(2.0 / 3.0) / 2.0)
    for name, found, expected in (("upper_m(4)", upper_m(4), expected_m), ("pack_Bk(2)", pack_bk(2), expected_pack)):
        result.total += 1
        result.details[name] = found
        if abs(found - expected) > 1e-9:
            result.fail({"name": name, "found": found, "expected": expected})
    return result


def check_maxreal(scale: float, seed: str) -> CheckResult:
    result = CheckResult(10, "planar max-realization")
    for index in range(_count(200, scale)):
        rng = make_rng(seed, 10, index)
        n = int(rng.integers(3, 26))
        components = int(rng.integers(1, min(4, n // 2) + 1))
        g = random_forest_map(n, rng, components=components)
        result.total += 1
        try:
            config = max_realize(g, MaxRealParams(seed=f"{seed}-{index}"))
        except RealizerError as exc:
            result.fail({"g": list(g.image), "error": str(exc)})
            continue
        if not certify_farthest(config, g).ok:
            result.fail({"g": list(g.image)})
    return result


def grid_argmax(b: float, samples: int = 200_001) -> float:
    """Height maximising g_b over an even grid of (0, 1)."""
    ys = np.linspace(0.0, 1.0, samples)[1:-1]
    values = 4.0 * (np.sqrt(1.0 - ys * ys) + math.sqrt(1.0 - b * b)) ** 2 + (ys + b) ** 2
    return float(ys[int(np.argmax(values))])


def check_ellipse(scale: float, seed: str) -> CheckResult:
    result = CheckResult(11, "ellipse root finding")
    rng = make_rng(seed, 11)
    grid = np.linspace(0.01, 0.33, 100)
    roots = [solve_mb(float(b)) for b in grid]
    for b, m in zip(grid, roots):
        result.total += 1
        if not m < b / 3.0:
            result.fail({"b": float(b), "m": m, "issue": "above b/3"})
        best = g_b(float(b), m)
        ys = rng.uniform(1e-9, 1.0 - 1e-9, size=_count(1000, scale))
        worse = [float(y) for y in ys if g_b(float(b), float(y)) > best * (1.0 + 1e-12)]
        if worse:
            result.fail({"b": float(b), "m": m, "beaten_by": worse[:3]})
    result.total += 1
    if not all(lo < hi for lo, hi in zip(roots, roots[1:])):
        result.fail({"issue": "b -> m_b not increasing"})

    spot = solve_mb(0.3)
    reference = grid_argmax(0.3)
    result.total += 1
    result.details = {"m_0.3": spot, "grid_argmax": reference}
    if abs(spot - reference) > 1e-5:
        result.fail({"m_0.3": spot, "grid_argmax": reference})
    return result


def check_croft6_plane(scale: float, seed: str) -> CheckResult:
    result = CheckResult(12, "croft6 planar negative control")
    params = PlaneSearchParams(candidates=_count(100_000, scale), seed=f"{seed}-plane")
    search = plane_search(croft6(), params)
    result.total = search.candidates
    result.details = {"polished": search.polished, "best_loss": search.best_loss}
    if search.found is not None:
        result.fail({"coords": search.found.coords.tolist()})
        result.vetoed = True
    return result


CHECKS: dict[int, Callable[[float, str], CheckResult]] = {
    1: check_pair_oracle,
    2: check_single_oracle,
    3: check_witnesses,
    4: check_labeling,
    5: check_simplex,
    6: check_spherical,
    7: check_caps,
    8: check_span,
    9: check_bounds,
    10: check_maxreal,
    11: check_ellipse,
    12: check_croft6_plane,
}


def run_checks(criteria: list[int], scale: float, seed: str) -> list[CheckResult]:
    results = []
    for criterion in criteria:
        started = time.perf_counter()
        result = CHECKS[criterion](scale, seed)
        result.seconds = time.perf_counter() - started
        logger.info("criterion %d (%s): %d/%d", criterion, result.name, result.total - result.failures, result.total)
        results.append(result)
    return results


def main() -> None:
    import argparse

    parser = argparse.ArgumentParser(description="Run the acceptance sweep")
    parser.add_argument("--only", type=int, nargs="+", choices=sorted(CHECKS), help="Criteria to run")
    parser.add_argument("--scale", type=float, default=1.0, help="Multiplier on sample counts")
    parser.add_argument("--seed", default="acceptance", help="Seed string")
    parser.add_argument("--records", default=str(RECORDS_FILE), help="Per-check JSONL output")
    parser.add_argument("--summary", default=str(SUMMARY_FILE), help="Summary JSON output")
    args = parser.parse_args()

    if not args.scale > 0.0:
        parser.error("--scale must be positive")
    configure_logging()
    criteria = args.only or sorted(CHECKS)

    print(f"Running {len(criteria)} acceptance checks (scale {args.scale})", flush=True)
    results = run_checks(criteria, args.scale, args.seed)

    print("\n" + "=" * 60)
    print("ACCEPTANCE RESULTS")
    print("=" * 60)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        print(
            f"  [{status}] {result.criterion:2d} {result.name:34s} "
            f"{result.total - result.failures}/{result.total} ({result.seconds:.1f}s)"
        )

    write_jsonl(Path(args.records), (r.to_json() for r in results))
    summary = {
        "seed": args.seed,
        "scale": args.scale,
        "passed": all(r.passed for r in results),
        "criteria": {str(r.criterion): r.passed for r in results},
    }
    write_json(Path(args.summary), summary)
    print(f"\nDetailed results saved to: {args.records}")
    print(f"Summary saved to: {args.summary}", flush=True)


if __name__ == "__main__":
    main()
