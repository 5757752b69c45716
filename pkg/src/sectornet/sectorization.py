"""Sector layouts as cut placements in cyclic incidence orders.

A node's sector layout is canonically a set of cuts: a cut at gap i
separates incident edge i from incident edge i+1 (cyclically) in the
node's bearing order. Angular axes are only an input form; any two axis
sets that land in the same gaps denote the same layout. j cuts on the
cycle create j contiguous sectors, so one cut means the node is
effectively unsectorized.
"""

from __future__ import annotations

import itertools
from bisect import bisect_left
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from .errors import (
    AxisOnEdgeError,
    SearchSpaceTooLargeError,
    SectorizationMismatchError,
)
from .netgen import ConnectivityGraph

ENUM_MAX_DEGREE = 12
ENUM_MAX_SECTORS = 6
AXIS_RETRY_STEP_DEGREES = 1e-3
AXIS_RETRY_COUNT = 100


@dataclass(frozen=True)
class Unsectorized:
    pass


@dataclass(frozen=True)
class General:
    pass


@dataclass(frozen=True)
class EvenHomogeneous:
    n_sectors: int
    axis_offset_degrees: float


SectorizationKind = Union[Unsectorized, General, EvenHomogeneous]


@dataclass(frozen=True)
class NodeSectorization:
    """Cut set for one node.

    ``cuts`` holds gap indices into the node's cyclic incidence order;
    ``sector_cap`` is the most sectors the node's hardware supports.
    """

    node: int
    cuts: tuple[int, ...]
    sector_cap: int

    def __post_init__(self) -> None:
        if self.sector_cap < 1:
            raise SectorizationMismatchError("sector_cap must be >= 1")
        if list(self.cuts) != sorted(set(self.cuts)):
            raise SectorizationMismatchError("cuts must be sorted and distinct")

    def sector_count(self) -> int:
        return max(1, len(self.cuts))


@dataclass(frozen=True)
class NetworkSectorization:
    per_node: dict[int, NodeSectorization]
    kind: SectorizationKind

    def node(self, node_id: int) -> NodeSectorization:
        return self.per_node[node_id]


def sector_arcs(cuts: Iterable[int], delta_size: int) -> list[tuple[int, ...]]:
    """Contiguous position arcs induced by a cut set.

    Sector i runs from just after cut i up to and including the next
    cut position; with a single cut the sector is the whole cycle.
    """
    if delta_size == 0:
        return []
    cs = sorted(cuts)
    if not cs:
        raise SectorizationMismatchError("a node with edges needs at least one cut")
    if cs[0] < 0 or cs[-1] >= delta_size:
        raise SectorizationMismatchError(
            f"cut indices {cs} out of range for degree {delta_size}"
        )
    arcs = []
    for i, cut in enumerate(cs):
        end = cs[(i + 1) % len(cs)]
        positions = []
        p = (cut + 1) % delta_size
        while True:
            positions.append(p)
            if p == end:
                break
            p = (p + 1) % delta_size
        arcs.append(tuple(positions))
    return arcs


def axes_to_cuts(
    node: int,
    bearings: tuple[float, ...],
    axis_bearings: Iterable[float],
    sector_cap: int | None = None,
) -> NodeSectorization:
    """Place a cut in every gap that contains at least one axis.

    ``bearings`` is the node's incident-edge bearing list in ascending
    order. Multiple axes in one gap collapse to one cut. An axis exactly
    on an edge bearing is ambiguous and rejected.
    """
    axes = [a % 360.0 for a in axis_bearings]
    if len(set(axes)) != len(axes):
        raise ValueError("axis bearings must be distinct modulo 360")
    d = len(bearings)
    cuts: set[int] = set()
    if d > 0:
        edge_set = set(bearings)
        for axis in axes:
            if axis in edge_set:
                raise AxisOnEdgeError(
                    f"axis {axis} deg coincides with an edge bearing at node {node}"
                )
            i = bisect_left(bearings, axis)
            cuts.add(i - 1 if 0 < i < d else d - 1)
    cap = sector_cap if sector_cap is not None else max(1, len(cuts))
    return NodeSectorization(node=node, cuts=tuple(sorted(cuts)), sector_cap=cap)


def unsectorized(graph: ConnectivityGraph) -> NetworkSectorization:
    """One sector per node: the canonical single cut at gap 0."""
    per_node = {}
    for n in range(graph.n_nodes):
        cuts = (0,) if graph.degree(n) >= 1 else ()
        per_node[n] = NodeSectorization(node=n, cuts=cuts, sector_cap=1)
    return NetworkSectorization(per_node=per_node, kind=Unsectorized())


def even_homogeneous(
    graph: ConnectivityGraph, n_sectors: int, axis_offset_degrees: float = 0.0
) -> NetworkSectorization:
    """Cuts induced at every node by parallel axes 360/K degrees apart.

    If some axis lands exactly on an edge bearing the offset is nudged
    by 1e-3 degree steps (up to 100 tries) before giving up.
    """
    if n_sectors < 2 or n_sectors % 2 != 0:
        raise ValueError("sector count must be even and >= 2")
    last_error: AxisOnEdgeError | None = None
    for attempt in range(AXIS_RETRY_COUNT + 1):
        offset = axis_offset_degrees + attempt * AXIS_RETRY_STEP_DEGREES
        axes = [(offset + i * 360.0 / n_sectors) % 360.0 for i in range(n_sectors)]
        per_node = {}
        try:
            for n in range(graph.n_nodes):
                per_node[n] = axes_to_cuts(
                    n, graph.incident_bearings[n], axes, sector_cap=n_sectors
                )
        except AxisOnEdgeError as exc:
            last_error = exc
            continue
        return NetworkSectorization(
            per_node=per_node,
            kind=EvenHomogeneous(n_sectors=n_sectors, axis_offset_degrees=offset),
        )
    assert last_error is not None
    raise last_error


def enumerate_node_sectorizations(
    delta_size: int, sector_cap: int
) -> Iterator[tuple[int, ...]]:
    """Every cut set of cardinality 1..min(cap, degree), no duplicates."""
    if delta_size > ENUM_MAX_DEGREE or sector_cap > ENUM_MAX_SECTORS:
        raise SearchSpaceTooLargeError(
            f"enumeration guard: degree {delta_size} > {ENUM_MAX_DEGREE} "
            f"or cap {sector_cap} > {ENUM_MAX_SECTORS}"
        )
    for j in range(1, min(sector_cap, delta_size) + 1):
        yield from itertools.combinations(range(delta_size), j)


def validate_sectorization(
    sectorization: NetworkSectorization, graph: ConnectivityGraph
) -> None:
    """Check that a sectorization fits a graph; raises on mismatch."""
    if sorted(sectorization.per_node) != list(range(graph.n_nodes)):
        raise SectorizationMismatchError("per_node must cover node ids 0..N-1")
    for n in range(graph.n_nodes):
        ns = sectorization.per_node[n]
        d = graph.degree(n)
        if ns.node != n:
            raise SectorizationMismatchError(f"entry for node {n} names node {ns.node}")
        if d == 0:
            if ns.cuts:
                raise SectorizationMismatchError(f"isolated node {n} cannot have cuts")
            continue
        if not (1 <= len(ns.cuts) <= ns.sector_cap):
            raise SectorizationMismatchError(
                f"node {n}: {len(ns.cuts)} cuts violates 1..{ns.sector_cap}"
            )
        if ns.cuts[0] < 0 or ns.cuts[-1] >= d:
            raise SectorizationMismatchError(
                f"node {n}: cut indices {ns.cuts} out of range for degree {d}"
            )
    kind = sectorization.kind
    if isinstance(kind, Unsectorized):
        for n in range(graph.n_nodes):
            if graph.degree(n) >= 1 and len(sectorization.per_node[n].cuts) != 1:
                raise SectorizationMismatchError(
                    f"unsectorized layout has {len(sectorization.per_node[n].cuts)} "
                    f"cuts at node {n}"
                )
    elif isinstance(kind, EvenHomogeneous):
        axes = [
            (kind.axis_offset_degrees + i * 360.0 / kind.n_sectors) % 360.0
            for i in range(kind.n_sectors)
        ]
        for n in range(graph.n_nodes):
            expected = axes_to_cuts(
                n, graph.incident_bearings[n], axes, sector_cap=kind.n_sectors
            )
            if expected.cuts != sectorization.per_node[n].cuts:
                raise SectorizationMismatchError(
                    f"node {n}: cuts {sectorization.per_node[n].cuts} do not match "
                    f"the declared axes (expected {expected.cuts})"
                )


def sectorization_to_json(sectorization: NetworkSectorization) -> dict:
    kind = sectorization.kind
    doc: dict = {}
    if isinstance(kind, Unsectorized):
        doc["kind"] = "unsectorized"
    elif isinstance(kind, General):
        doc["kind"] = "general"
    elif isinstance(kind, EvenHomogeneous):
        doc["kind"] = "even-homogeneous"
        doc["n_sectors"] = kind.n_sectors
        doc["axis_offset_degrees"] = kind.axis_offset_degrees
    else:
        raise SectorizationMismatchError(f"unknown kind {kind!r}")
    doc["per_node"] = {
        str(n): {"cuts": list(ns.cuts)}
        for n, ns in sorted(sectorization.per_node.items())
    }
    return doc


def sectorization_from_json(obj: dict) -> NetworkSectorization:
    """Rebuild a sectorization; caps default to what the kind implies
    (K for homogeneous layouts, the observed cut count otherwise)."""
    try:
        kind_name = obj["kind"]
        per_node_doc = obj["per_node"]
    except (KeyError, TypeError) as exc:
        raise SectorizationMismatchError(f"bad sectorization document: {exc}") from exc
    if kind_name == "unsectorized":
        kind: SectorizationKind = Unsectorized()
        cap = lambda cuts: 1
    elif kind_name == "general":
        kind = General()
        cap = lambda cuts: max(1, len(cuts))
    elif kind_name == "even-homogeneous":
        kind = EvenHomogeneous(
            n_sectors=int(obj["n_sectors"]),
            axis_offset_degrees=float(obj["axis_offset_degrees"]),
        )
        cap = lambda cuts: kind.n_sectors
    else:
        raise SectorizationMismatchError(f"unknown kind {kind_name!r}")
    per_node = {}
    for key, entry in per_node_doc.items():
        n = int(key)
        cuts = tuple(int(c) for c in entry["cuts"])
        per_node[n] = NodeSectorization(node=n, cuts=cuts, sector_cap=cap(cuts))
    return NetworkSectorization(per_node=per_node, kind=kind)
