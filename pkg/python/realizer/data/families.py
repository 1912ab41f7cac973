from __future__ import annotations

import itertools
from typing import Iterator

import numpy as np

from ..common.errors import ConstructionError, PreconditionError
from ..core.funcgraph import FuncMap, FuncPair, sources


FAMILY_NAMES = ("croft6", "star", "btree", "twofix4")
MAX_DRAWS = 200


def croft6() -> FuncPair:
    """Realizable pair on 6 points with no planar realization."""
    return FuncPair.of([6, 6, 6, 6, 6, 1], [2, 1, 1, 1, 1, 2])


def star(n: int) -> FuncPair:
    """Every point's nearest is n; used for the upper bound on m(k)."""
    if n < 3:
        raise PreconditionError(f"star needs n >= 3, got {n}")
    f = [n] * (n - 1) + [1]
    g = [2] + [1] * (n - 2) + [2]
    return FuncPair.of(f, g)


def twofix4() -> FuncPair:
    """f∘g fixes both 1 and 2, so the pair is not realizable."""
    return FuncPair.of([2, 1, 1, 2], [3, 4, 4, 3])


def btree(s: int) -> FuncMap:
    """Complete upward binary tree of depth s (heap order, root 1) plus a partner of the root."""
    if s < 1:
        raise PreconditionError(f"btree depth must be at least 1, got {s}")
    size = 2 ** (s + 1)
    partner = size
    image = [partner] + [v // 2 for v in range(2, size)] + [1]
    return FuncMap(tuple(image))


def btree_levels(s: int) -> list[list[int]]:
    return [list(range(2**depth, 2 ** (depth + 1))) for depth in range(s + 1)]


def family(name: str, param: int | None = None) -> FuncPair | FuncMap:
    if name == "croft6":
        return croft6()
    if name == "twofix4":
        return twofix4()
    if name == "star":
        if param is None:
            raise PreconditionError("star needs a size parameter")
        return star(param)
    if name == "btree":
        if param is None:
            raise PreconditionError("btree needs a depth parameter")
        return btree(param)
    raise PreconditionError(f"unknown family {name!r}; expected one of {', '.join(FAMILY_NAMES)}")


def enumerate_maps(n: int) -> Iterator[FuncMap]:
    """Every fixed-point-free map on [n]."""
    choices = [[j for j in range(1, n + 1) if j != i] for i in range(1, n + 1)]
    for image in itertools.product(*choices):
        yield FuncMap(image)


def enumerate_pairs(n: int) -> Iterator[FuncPair]:
    """Every pair of fixed-point-free maps that differ at each point."""
    for f in enumerate_maps(n):
        choices = [[j for j in range(1, n + 1) if j not in (i, f(i))] for i in range(1, n + 1)]
        for image in itertools.product(*choices):
            yield FuncPair(f, FuncMap(image))


def _draw_forest(
    n: int,
    rng: np.random.Generator,
    cycles: int,
    max_depth: int | None,
    avoid: list[set[int]],
    blocked_targets: set[int],
) -> list[int] | None:
    order = [int(v) + 1 for v in rng.permutation(n)]
    image = [0] * (n + 1)
    depth = [0] * (n + 1)
    placed: list[int] = []

    core = [v for v in order if v not in blocked_targets][: 2 * cycles]
    if len(core) < 2 * cycles:
        return None
    for a, b in zip(core[::2], core[1::2]):
        if b in avoid[a] or a in avoid[b]:
            return None
        image[a], image[b] = b, a
        placed.extend((a, b))

    for v in order:
        if image[v]:
            continue
        options = [
            u for u in placed
            if u not in avoid[v] and u not in blocked_targets
            and (max_depth is None or depth[u] < max_depth)
        ]
        if not options:
            return None
        target = options[int(rng.integers(len(options)))]
        image[v] = target
        depth[v] = depth[target] + 1
        placed.append(v)
    return image[1:]


def random_forest_map(
    n: int,
    rng: np.random.Generator,
    components: int | None = None,
    max_depth: int | None = None,
    avoid: list[set[int]] | None = None,
    blocked_targets: set[int] | None = None,
) -> FuncMap:
    """Random map whose functional graph is in-trees hanging off 2-cycles.

    `avoid[i - 1]` lists images forbidden for i; `blocked_targets` may not be anyone's image.
    """
    if n < 2:
        raise PreconditionError(f"need at least 2 points, got {n}")
    if components is None:
        components = int(rng.integers(1, max(1, n // 4) + 1))
    if not 1 <= 2 * components <= n:
        raise PreconditionError(f"{components} 2-cycles do not fit on {n} points")
    table = [set()] + [set(a) for a in avoid] if avoid is not None else [set() for _ in range(n + 1)]
    blocked = set(blocked_targets or ())
    for _ in range(MAX_DRAWS):
        image = _draw_forest(n, rng, components, max_depth, table, blocked)
        if image is not None:
            return FuncMap(tuple(image))
    raise ConstructionError(f"no forest map on {n} points satisfied the constraints")


def random_nice_pair(n: int, rng: np.random.Generator, shared_edge: bool | None = None) -> FuncPair:
    """Random realizable pair; with `shared_edge` the shadows share one edge."""
    if n < 3:
        raise PreconditionError(f"a pair needs at least 3 points, got {n}")
    if n == 3:
        # g(1) is forced onto the preimage side of f, so f.g always has a fixed point
        if shared_edge is False:
            raise PreconditionError("every nice pair on 3 points has a shared edge")
        shared_edge = True
    elif shared_edge is None:
        shared_edge = bool(rng.integers(2))

    for _ in range(MAX_DRAWS):
        f = random_forest_map(n, rng)
        preimages: list[set[int]] = [set() for _ in range(n + 1)]
        for i in f.vertices():
            preimages[f(i)].add(i)
        # g(i) must avoid f(i), and f(g(i)) = i must not happen
        avoid = [{f(i)} | preimages[i] for i in f.vertices()]

        f_sources = sorted(sources(f))
        if shared_edge and not f_sources:
            continue
        k1 = f_sources[int(rng.integers(len(f_sources)))] if shared_edge else None
        k2 = f(k1) if k1 is not None else None
        if k2 is not None:
            # g(k2) is replaced by k1 below
            avoid[k2 - 1] = set()
        try:
            g = random_forest_map(
                n,
                rng,
                components=int(rng.integers(1, max(1, (n - 1) // 4) + 1)),
                avoid=avoid,
                blocked_targets={k2} if k2 is not None else None,
            )
        except ConstructionError:
            continue
        if k1 is not None:
            image = list(g.image)
            image[k2 - 1] = k1
            g = FuncMap(tuple(image))
        return FuncPair(f, g)
    raise ConstructionError(f"no nice pair on {n} points within {MAX_DRAWS} draws")
