#!/usr/bin/env python3
"""
Instance generator

Writes the named fixtures to data/instances/*.json and, optionally, a JSONL file of random
realizable pairs and random max-realizable maps for batch runs.

Usage:
    python tools/data/generate_instances.py
    python tools/data/generate_instances.py --random-pairs 500 --max-n 64 --seed nightly
"""

from __future__ import annotations

from pathlib import Path
from typing import Any

from ..common.instances import InstanceFile, save_instance
from ..common.jsonl import write_jsonl
from ..common.paths import INSTANCE_DIR
from ..common.runtime import make_rng
from ..core.funcgraph import FuncMap, FuncPair
from .families import btree, croft6, random_forest_map, random_nice_pair, star, twofix4


def _pair_instance(p: FuncPair, **metadata: str) -> InstanceFile:
    return InstanceFile(n=p.n, f=p.f.image, g=p.g.image, metadata=metadata)


def _single_instance(f: FuncMap, **metadata: str) -> InstanceFile:
    return InstanceFile(n=f.n, f=f.image, metadata=metadata)


def named_instances() -> dict[str, InstanceFile]:
    return {
        "croft6": _pair_instance(croft6(), family="croft6", note="realizable, not in the plane"),
        "star5": _pair_instance(star(5), family="star"),
        "twofix4": _pair_instance(twofix4(), family="twofix4", note="two fixed points of f.g"),
        "tri3": _pair_instance(FuncPair.of([2, 1, 2], [3, 3, 1]), family="tri3"),
        "cycle3": _single_instance(FuncMap((2, 3, 1)), family="cycle3", note="3-cycle"),
        "chain": _single_instance(FuncMap((2, 1, 1, 3, 4)), family="chain"),
        "btree2": _single_instance(btree(2), family="btree", depth="2"),
    }


def random_records(count: int, min_n: int, max_n: int, seed: str, kind: str) -> list[dict[str, Any]]:
    records = []
    for index in range(count):
        rng = make_rng(seed, index)
        n = int(rng.integers(min_n, max_n + 1))
        if kind == "pair":
            instance = _pair_instance(random_nice_pair(n, rng), seed=seed, index=str(index))
        else:
            f = random_forest_map(n, rng, components=int(rng.integers(1, min(4, n // 2) + 1)))
            instance = _single_instance(f, seed=seed, index=str(index))
        records.append(instance.to_json())
    return records


def main() -> None:
    import argparse

    parser = argparse.ArgumentParser(description="Generate instance fixtures")
    parser.add_argument("--output-dir", default=str(INSTANCE_DIR), help="Fixture directory")
    parser.add_argument("--random-pairs", type=int, default=0, help="Random nice pairs to write")
    parser.add_argument("--random-maps", type=int, default=0, help="Random max-realizable maps to write")
    parser.add_argument("--min-n", type=int, default=3, help="Smallest random instance")
    parser.add_argument("--max-n", type=int, default=32, help="Largest random instance")
    parser.add_argument("--seed", default="instances", help="Seed string for random instances")
    args = parser.parse_args()

    if not 3 <= args.min_n <= args.max_n:
        parser.error("need 3 <= --min-n <= --max-n")

    output_dir = Path(args.output_dir)
    for name, instance in named_instances().items():
        path = save_instance(output_dir / f"{name}.json", instance)
        print(f"Saved {name} (n={instance.n}) to {path}", flush=True)

    if args.random_pairs:
        records = random_records(args.random_pairs, args.min_n, args.max_n, args.seed, "pair")
        path = output_dir / "random_pairs.jsonl"
        write_jsonl(path, records)
        print(f"Saved {len(records)} random pairs to {path}", flush=True)

    if args.random_maps:
        records = random_records(args.random_maps, args.min_n, args.max_n, args.seed, "map")
        path = output_dir / "random_maps.jsonl"
        write_jsonl(path, records)
        print(f"Saved {len(records)} random maps to {path}", flush=True)


if __name__ == "__main__":
    main()
