#!/usr/bin/env python3
"""
Realizer command line

Decides whether nearest/farthest-neighbour maps are realizable and writes certified witnesses.

Usage:
    python tools/realizer.py check data/instances/croft6.json
    python tools/realizer.py check data/instances/random_pairs.jsonl
    python tools/realizer.py witness data/instances/croft6.json --out out/croft6_metric.json
    python tools/realizer.py embed data/instances/croft6.json --mode spherical --k 12 --seed 1 --out out/croft6_r12.json
    python tools/realizer.py maxreal data/instances/chain.json --out out/chain_plane.json
    python tools/realizer.py verify out/croft6_r12.json data/instances/croft6.json
    python tools/realizer.py oracle data/instances/twofix4.json
    python tools/realizer.py bounds 4
    python tools/realizer.py family star 5 --out data/instances/star5.json

Exit codes: 0 success, 1 usage or format error, 2 not realizable, 3 sampling or shrink budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Any, Callable

from . import __version__
from .common.errors import (
    ConstructionError,
    InstanceFormatError,
    NotNiceError,
    PreconditionError,
    RealizerError,
    ShrinkBudgetError,
)
from .common.instances import (
    InstanceFile,
    load_instance,
    load_points,
    parse_instance,
    save_instance,
    save_matrix,
    save_points,
)
from .common.jsonl import iter_jsonl
from .common.runtime import configure_logging
from .core.funcgraph import FuncMap, FuncPair
from .core.realize import NiceReport, Violation, check_images, metric_witness, single_report
from .core.verify import (
    PointConfig,
    certify,
    certify_farthest,
    extract_maps,
    is_metric,
    oracle,
    oracle_single,
)
from .data.families import FAMILY_NAMES, family
from .geometry.bounds import bounds
from .geometry.embed import EmbedParams, PlacementStats, simplex, spherical_embed
from .geometry.maxreal2d import MaxRealParams, max_realize


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NOT_REALIZABLE = 2
EXIT_BUDGET = 3


def _emit(document: dict[str, Any]) -> None:
    print(json.dumps(document, indent=2, sort_keys=True), flush=True)


def _single_images_report(images: tuple[int, ...]) -> NiceReport:
    fixed = [
        Violation("fixed_point", {"vertex": i, "side": "f"})
        for i, target in enumerate(images, start=1)
        if target == i
    ]
    if fixed:
        return NiceReport(tuple(fixed))
    return single_report(FuncMap(images))


def _report_for(instance: InstanceFile) -> NiceReport:
    if instance.g is not None:
        return check_images(instance.f, instance.g)
    return _single_images_report(instance.f)


def _nice_pair(instance: InstanceFile) -> FuncPair:
    if instance.g is None:
        raise PreconditionError("this command needs a pair instance with both f and g")
    report = check_images(instance.f, instance.g)
    if not report.is_nice:
        summary = "; ".join(str(v) for v in report.violations)
        raise NotNiceError(f"pair is not realizable: {summary}", report=report)
    return FuncPair.of(instance.f, instance.g)


def _provenance(seed: str, started: float, **diagnostics: Any) -> dict[str, Any]:
    return {
        "seed": seed,
        "version": __version__,
        "timing": {"seconds": time.perf_counter() - started},
        "diagnostics": diagnostics,
    }


def _check_batch(path: Path) -> int:
    """One verdict line per record of a JSONL batch; exit 2 if any record is not realizable."""
    failed = 0
    for index, document in enumerate(iter_jsonl(path), start=1):
        try:
            instance = parse_instance(document)
        except InstanceFormatError as exc:
            raise InstanceFormatError(str(exc), location=f"{path}:{index}") from exc
        report = _report_for(instance)
        failed += not report.is_nice
        print(json.dumps({"record": index, "n": instance.n, **report.to_json()}, sort_keys=True), flush=True)
    logger.info("checked %s: %d not realizable", path, failed)
    return EXIT_NOT_REALIZABLE if failed else EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    if args.instance.endswith(".jsonl"):
        return _check_batch(Path(args.instance))
    instance = load_instance(Path(args.instance))
    report = _report_for(instance)
    _emit({"n": instance.n, "pair": instance.is_pair, **report.to_json()})
    return EXIT_OK if report.is_nice else EXIT_NOT_REALIZABLE


def cmd_witness(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    p = _nice_pair(load_instance(Path(args.instance)))
    d = metric_witness(p)

    maps = extract_maps(d)
    if not (maps.distinct and maps.nearest == p.f and maps.farthest == p.g and is_metric(d)):
        raise ConstructionError("metric witness failed self-certification")

    path = save_matrix(Path(args.out), d.d, _provenance(args.seed, started, certified=True))
    print(f"Saved {p.n}x{p.n} metric witness to {path}", flush=True)
    return EXIT_OK


def cmd_embed(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    p = _nice_pair(load_instance(Path(args.instance)))

    if args.mode == "simplex":
        if args.k is not None and args.k < p.n - 1:
            raise PreconditionError(f"simplex mode writes {p.n - 1} coordinates, --k {args.k} is too small")
        config = simplex(p)
        diagnostics: dict[str, Any] = {"mode": "simplex"}
    else:
        params = EmbedParams(
            k=args.k if args.k is not None else EmbedParams.k,
            seed=args.seed,
            max_attempts_per_point=args.max_attempts,
            max_restarts=args.max_restarts,
        )
        stats = PlacementStats()
        config = spherical_embed(p, params, stats)
        diagnostics = {
            "mode": "spherical",
            "restarts": stats.restarts,
            "pinned": stats.pinned,
            "rejected_points": stats.rejected_points,
        }
        if config is None:
            _emit({"status": "budget_exhausted", "k": params.k, **diagnostics})
            return EXIT_BUDGET

    report = certify(config, p)
    if not report.ok:
        raise ConstructionError(f"embedding failed self-certification: {report.to_json()}")
    path = save_points(
        Path(args.out), config.coords, args.seed,
        _provenance(args.seed, started, certified=True, **diagnostics),
    )
    print(f"Saved {p.n} points in R^{config.k} to {path}", flush=True)
    return EXIT_OK


def cmd_maxreal(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    instance = load_instance(Path(args.instance))
    # a pair instance contributes its farthest map
    images = instance.g if instance.g is not None else instance.f
    report = _single_images_report(images)
    if not report.is_nice:
        _emit(report.to_json())
        return EXIT_NOT_REALIZABLE

    g = FuncMap(images)
    try:
        config = max_realize(g, MaxRealParams(seed=args.seed))
    except ShrinkBudgetError as exc:
        _emit({"status": "budget_exhausted", "n": g.n, "reason": str(exc)})
        return EXIT_BUDGET
    if not certify_farthest(config, g).ok:
        raise ConstructionError("planar realization failed self-certification")
    path = save_points(Path(args.out), config.coords, args.seed, _provenance(args.seed, started, certified=True))
    print(f"Saved {g.n} points in the plane to {path}", flush=True)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    points = load_points(Path(args.points))
    instance = load_instance(Path(args.instance))
    if points.n != instance.n:
        raise PreconditionError(f"points file has {points.n} points, instance has n={instance.n}")

    config = PointConfig(points.points)
    if instance.g is not None:
        report = certify(config, FuncPair.of(instance.f, instance.g))
    else:
        report = certify_farthest(config, FuncMap(instance.f))
    _emit(report.to_json())
    return EXIT_OK if report.ok else EXIT_NOT_REALIZABLE


def cmd_oracle(args: argparse.Namespace) -> int:
    instance = load_instance(Path(args.instance))
    report = _report_for(instance)
    if any(v.kind in ("fixed_point", "collision") for v in report.violations):
        _emit({"realizable": False, **report.to_json()})
        return EXIT_NOT_REALIZABLE

    if instance.g is not None:
        verdict = oracle(FuncPair.of(instance.f, instance.g))
        document: dict[str, Any] = {"realizable": verdict}
    else:
        f = FuncMap(instance.f)
        nearest = oracle_single(f, "nearest")
        farthest = oracle_single(f, "farthest")
        verdict = nearest and farthest
        document = {"realizable": verdict, "nearest": nearest, "farthest": farthest}
    _emit(document)
    print("realizable" if verdict else "not realizable", flush=True)
    return EXIT_OK if verdict else EXIT_NOT_REALIZABLE


def cmd_bounds(args: argparse.Namespace) -> int:
    _emit(bounds(args.k).to_json())
    return EXIT_OK


def cmd_family(args: argparse.Namespace) -> int:
    built = family(args.name, args.param)
    metadata = {"family": args.name}
    if args.param is not None:
        metadata["param"] = str(args.param)
    if isinstance(built, FuncPair):
        instance = InstanceFile(n=built.n, f=built.f.image, g=built.g.image, metadata=metadata)
    else:
        instance = InstanceFile(n=built.n, f=built.image, metadata=metadata)

    if args.out:
        path = save_instance(Path(args.out), instance)
        print(f"Saved {args.name} (n={instance.n}) to {path}", flush=True)
    else:
        _emit(instance.to_json())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="realizer", description="Nearest/farthest neighbour map realizability")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name: str, handler: Callable[[argparse.Namespace], int], help_text: str) -> argparse.ArgumentParser:
        child = sub.add_parser(name, help=help_text)
        child.set_defaults(handler=handler)
        return child

    check = command("check", cmd_check, "Report whether an instance is realizable")
    check.add_argument("instance", help="Instance JSON, or a JSONL batch of instances")

    witness = command("witness", cmd_witness, "Write a metric witness for a pair")
    witness.add_argument("instance")
    witness.add_argument("--out", required=True, help="Output matrix file")
    witness.add_argument("--seed", default="0", help="Recorded in the result file")

    embed = command("embed", cmd_embed, "Write a Euclidean witness for a pair")
    embed.add_argument("instance")
    embed.add_argument("--mode", choices=("simplex", "spherical"), default="simplex")
    embed.add_argument("--k", type=int, default=None, help="Target dimension")
    embed.add_argument("--seed", default="0", help="Seed string")
    embed.add_argument("--out", required=True, help="Output points file")
    embed.add_argument("--max-attempts", type=int, default=EmbedParams.max_attempts_per_point)
    embed.add_argument("--max-restarts", type=int, default=EmbedParams.max_restarts)

    maxreal = command("maxreal", cmd_maxreal, "Write a planar realization of a farthest map")
    maxreal.add_argument("instance")
    maxreal.add_argument("--seed", default="0", help="Seed string")
    maxreal.add_argument("--out", required=True, help="Output points file")

    verify = command("verify", cmd_verify, "Certify a points file against an instance")
    verify.add_argument("points")
    verify.add_argument("instance")

    oracle_cmd = command("oracle", cmd_oracle, "Decide realizability by order enumeration (n <= 5)")
    oracle_cmd.add_argument("instance")

    bounds_cmd = command("bounds", cmd_bounds, "Print the size bounds for dimension k")
    bounds_cmd.add_argument("k", type=int)

    family_cmd = command("family", cmd_family, "Write a named instance family")
    family_cmd.add_argument("name", choices=FAMILY_NAMES)
    family_cmd.add_argument("param", type=int, nargs="?", default=None)
    family_cmd.add_argument("--out", default=None, help="Output instance file (stdout if omitted)")
    return parser


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    configure_logging()
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    logger.debug("running %s", args.command)
    try:
        return args.handler(args)
    except NotNiceError as exc:
        if exc.report is not None:
            _emit(exc.report.to_json())
        print(f"error: {exc}", file=sys.stderr, flush=True)
        return EXIT_NOT_REALIZABLE
    except ShrinkBudgetError as exc:
        print(f"error: {exc}", file=sys.stderr, flush=True)
        return EXIT_BUDGET
    except (RealizerError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr, flush=True)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
