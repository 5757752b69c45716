"""Maximum-weight matching solvers used by the link scheduler.

Three routes with one contract: ``mwm_general`` handles arbitrary
graphs through the blossom kernel, ``mwm_bipartite`` exploits a known
two-coloring through the assignment kernel, and ``enumerate_matchings``
walks every matching of a small graph so the optimizers can be checked
against exhaustive search. All solvers treat weights as nonnegative,
never match a zero-weight edge, and return edge ids of the input graph.

Results are deterministic for a given input. When several matchings
share the optimal weight, which one is returned depends on the input
ordering and is not otherwise specified.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ._blossom import blossom_mate
from ._hungarian import assign_min_cost
from ._jit import JIT_ENABLED
from .errors import InvalidBipartitionError, SearchSpaceTooLargeError

ENUM_MAX_EDGES = 22


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected simple graph with one nonnegative weight per edge."""

    n_vertices: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.n_vertices < 0:
            raise ValueError("vertex count must be nonnegative")
        if len(self.edges) != len(self.weights):
            raise ValueError("edges and weights must have equal length")
        seen = set()
        for a, b in self.edges:
            if not (0 <= a < self.n_vertices and 0 <= b < self.n_vertices):
                raise ValueError(f"edge ({a}, {b}) out of range")
            if a == b:
                raise ValueError(f"self loop at vertex {a}")
            key = (a, b) if a < b else (b, a)
            if key in seen:
                raise ValueError(f"duplicate edge {key}")
            seen.add(key)
        for w in self.weights:
            if not math.isfinite(w) or w < 0:
                raise ValueError(f"weight {w} is not finite and nonnegative")


@dataclass(frozen=True)
class Matching:
    """Pairwise vertex-disjoint edge set, by edge id, with its weight."""

    edge_ids: tuple[int, ...]
    total_weight: float


def _total(graph: WeightedGraph, edge_ids: Sequence[int]) -> float:
    total = 0.0
    for eid in sorted(edge_ids):
        total += graph.weights[eid]
    return total


def mwm_general(graph: WeightedGraph) -> Matching:
    """Maximum-weight matching on an arbitrary graph."""
    kept = [eid for eid, w in enumerate(graph.weights) if w > 0]
    if not kept:
        return Matching(edge_ids=(), total_weight=0.0)

    m = len(kept)
    edges_u = np.empty(m, np.int64)
    edges_v = np.empty(m, np.int64)
    weight_2x = np.empty(m, np.float64)
    for i, eid in enumerate(kept):
        a, b = graph.edges[eid]
        edges_u[i] = a
        edges_v[i] = b
        weight_2x[i] = 2.0 * graph.weights[eid]

    n = graph.n_vertices
    deg = np.zeros(n, np.int64)
    for i in range(m):
        deg[edges_u[i]] += 1
        deg[edges_v[i]] += 1
    nb_ptr = np.zeros(n + 1, np.int64)
    nb_ptr[1:] = np.cumsum(deg)
    nb_end = np.empty(2 * m, np.int64)
    fill = nb_ptr[:-1].copy()
    for i in range(m):
        u = edges_u[i]
        v = edges_v[i]
        nb_end[fill[u]] = 2 * i + 1
        fill[u] += 1
        nb_end[fill[v]] = 2 * i
        fill[v] += 1

    mate = blossom_mate(n, edges_u, edges_v, weight_2x, nb_ptr, nb_end)
    chosen = sorted({kept[int(p) >> 1] for p in mate if p >= 0})
    return Matching(edge_ids=tuple(chosen), total_weight=_total(graph, chosen))


def mwm_bipartite(graph: WeightedGraph, coloring: Sequence[int]) -> Matching:
    """Maximum-weight matching given a proper two-coloring.

    Raises InvalidBipartitionError when the coloring does not have one
    value per vertex in {0, 1} or some edge joins two same-colored
    vertices.
    """
    if len(coloring) != graph.n_vertices:
        raise InvalidBipartitionError(
            f"coloring has {len(coloring)} entries for "
            f"{graph.n_vertices} vertices"
        )
    for v, c in enumerate(coloring):
        if c not in (0, 1):
            raise InvalidBipartitionError(f"vertex {v} has color {c}")
    for a, b in graph.edges:
        if coloring[a] == coloring[b]:
            raise InvalidBipartitionError(
                f"edge ({a}, {b}) joins two vertices of color {coloring[a]}"
            )

    kept = [eid for eid, w in enumerate(graph.weights) if w > 0]
    if not kept:
        return Matching(edge_ids=(), total_weight=0.0)

    left_vertices = sorted(
        {v for eid in kept for v in graph.edges[eid] if coloring[v] == 0}
    )
    right_vertices = sorted(
        {v for eid in kept for v in graph.edges[eid] if coloring[v] == 1}
    )
    if len(left_vertices) > len(right_vertices):
        left_vertices, right_vertices = right_vertices, left_vertices
    left_index = {v: i for i, v in enumerate(left_vertices)}
    right_index = {v: j for j, v in enumerate(right_vertices)}

    cost = np.zeros((len(left_vertices), len(right_vertices)), np.float64)
    eid_at = {}
    for eid in kept:
        a, b = graph.edges[eid]
        if a in left_index:
            i, j = left_index[a], right_index[b]
        else:
            i, j = left_index[b], right_index[a]
        cost[i, j] = -graph.weights[eid]
        eid_at[(i, j)] = eid

    owner = assign_min_cost(cost)
    chosen = sorted(
        eid_at[(int(owner[j]), j)]
        for j in range(len(right_vertices))
        if owner[j] >= 0 and (int(owner[j]), j) in eid_at
    )
    return Matching(edge_ids=tuple(chosen), total_weight=_total(graph, chosen))


def enumerate_matchings(graph: WeightedGraph) -> Iterator[Matching]:
    """Every matching of the graph, the empty one included.

    Guarded exhaustive search: raises SearchSpaceTooLargeError beyond
    ENUM_MAX_EDGES edges.
    """
    if len(graph.edges) > ENUM_MAX_EDGES:
        raise SearchSpaceTooLargeError(
            f"{len(graph.edges)} edges exceed the enumeration cap of "
            f"{ENUM_MAX_EDGES}"
        )

    m = len(graph.edges)

    def walk(i: int, used: int, chosen: tuple[int, ...]) -> Iterator[Matching]:
        if i == m:
            yield Matching(edge_ids=chosen, total_weight=_total(graph, chosen))
            return
        yield from walk(i + 1, used, chosen)
        a, b = graph.edges[i]
        mask = (1 << a) | (1 << b)
        if not used & mask:
            yield from walk(i + 1, used | mask, chosen + (i,))

    yield from walk(0, 0, ())


def warm_up() -> None:
    """Compile both matching kernels on tiny inputs.

    Call once before timing-sensitive use so compilation cost never
    lands inside a measured region. A no-op when compilation is
    disabled.
    """
    if not JIT_ENABLED:
        return
    tiny = WeightedGraph(
        n_vertices=4,
        edges=((0, 1), (1, 2), (2, 3), (0, 3)),
        weights=(1.0, 2.0, 1.0, 2.0),
    )
    mwm_general(tiny)
    mwm_bipartite(tiny, (0, 1, 0, 1))
