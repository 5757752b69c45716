"""Sector-vertex auxiliary graph construction and decomposition.

Every node is replaced by one vertex per sector; each physical
undirected edge is inherited by exactly one auxiliary edge joining the
two sector-vertices that contain it. Auxiliary edge i corresponds to
physical edge i, which makes the edge correspondence a bijection by
construction. The auxiliary graph is stored undirected: at most one
direction of a physical link can ever be active because both directions
occupy the same two sector-vertices, so transmit direction is a per-slot
scheduling attribute rather than graph structure.

Homogeneous layouts with K parallel axes get exactly K vertices per
node (empty sectors stay as isolated vertices); other layouts get one
vertex per cut arc, and a degree-0 node keeps a single isolated vertex.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .errors import SectorizationMismatchError, UnknownLinkError
from .netgen import ConnectivityGraph
from .sectorization import (
    EvenHomogeneous,
    NetworkSectorization,
    sector_arcs,
    validate_sectorization,
)


@dataclass(frozen=True)
class AuxiliaryGraph:
    graph: ConnectivityGraph = field(repr=False)
    sectorization: NetworkSectorization = field(repr=False)
    vertices: tuple[tuple[int, int], ...]
    vertex_offset: tuple[int, ...] = field(repr=False)
    sector_counts: tuple[int, ...] = field(repr=False)
    edges: tuple[tuple[int, int], ...] = field(repr=False)
    vertex_of_position: tuple[tuple[int, ...], ...] = field(repr=False)
    adjacency: tuple[tuple[tuple[int, int], ...], ...] = field(repr=False)
    components: tuple[tuple[int, ...], ...] = field(repr=False)
    component_of: tuple[int, ...] = field(repr=False)
    bipartite_flags: tuple[bool, ...] = field(repr=False)
    coloring: tuple[int, ...] = field(repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    def vertex_id(self, node: int, sector: int) -> int:
        if not (0 <= sector < self.sector_counts[node]):
            raise IndexError(f"node {node} has no sector {sector}")
        return self.vertex_offset[node] + sector

    def edge_vertices(self, physical_edge_id: int) -> tuple[int, int]:
        """The auxiliary endpoints inheriting a physical edge."""
        return self.edges[physical_edge_id]

    def physical_edge(self, aux_edge_id: int) -> tuple[int, int]:
        """Inverse direction of the correspondence (identity on ids)."""
        return self.graph.edges[aux_edge_id]

    def nonempty_component_count(self) -> int:
        return sum(1 for comp in self.components if len(comp) > 1)

    def all_bipartite(self) -> bool:
        return all(self.bipartite_flags)

    def vertex_flow_degree(self, vertex: int) -> int:
        return len(self.adjacency[vertex])


def geometric_sector_index(
    bearing: float, axis_offset_degrees: float, n_sectors: int
) -> int:
    width = 360.0 / n_sectors
    rel = (bearing - axis_offset_degrees) % 360.0
    k = int(math.floor(rel / width))
    return min(k, n_sectors - 1)


def build_auxiliary(
    graph: ConnectivityGraph, sigma: NetworkSectorization
) -> AuxiliaryGraph:
    """Construct the sector-vertex graph for a layout on a graph.

    Raises SectorizationMismatchError when the layout does not fit the
    graph (wrong node cover, out-of-range cuts, or homogeneous cuts that
    disagree with the declared axes).
    """
    validate_sectorization(sigma, graph)
    kind = sigma.kind
    homogeneous = isinstance(kind, EvenHomogeneous)

    vertices: list[tuple[int, int]] = []
    vertex_offset: list[int] = []
    sector_counts: list[int] = []
    vertex_of_position: list[tuple[int, ...]] = []
    for n in range(graph.n_nodes):
        d = graph.degree(n)
        offset = len(vertices)
        vertex_offset.append(offset)
        if homogeneous:
            count = kind.n_sectors
            labels = [
                geometric_sector_index(
                    b, kind.axis_offset_degrees, kind.n_sectors
                )
                for b in graph.incident_bearings[n]
            ]
            arcs = sector_arcs(sigma.per_node[n].cuts, d) if d else []
            for arc in arcs:
                arc_labels = {labels[p] for p in arc}
                if len(arc_labels) != 1:
                    raise SectorizationMismatchError(
                        f"node {n}: cut arc {arc} straddles sectors {arc_labels}"
                    )
            vertex_of_position.append(tuple(offset + k for k in labels))
        else:
            arcs = sector_arcs(sigma.per_node[n].cuts, d) if d else []
            count = max(1, len(arcs))
            pos_to_sector = [0] * d
            for sector_index, arc in enumerate(arcs):
                for p in arc:
                    pos_to_sector[p] = sector_index
            vertex_of_position.append(tuple(offset + s for s in pos_to_sector))
        sector_counts.append(count)
        vertices.extend((n, k) for k in range(count))

    position_of_edge: list[dict[int, int]] = []
    for n in range(graph.n_nodes):
        position_of_edge.append(
            {eid: p for p, eid in enumerate(graph.incident_edges[n])}
        )

    aux_edges: list[tuple[int, int]] = []
    for eid, (a, b) in enumerate(graph.edges):
        va = vertex_of_position[a][position_of_edge[a][eid]]
        vb = vertex_of_position[b][position_of_edge[b][eid]]
        aux_edges.append((va, vb))

    n_vertices = len(vertices)
    adjacency: list[list[tuple[int, int]]] = [[] for _ in range(n_vertices)]
    for eid, (va, vb) in enumerate(aux_edges):
        adjacency[va].append((vb, eid))
        adjacency[vb].append((va, eid))

    component_of = [-1] * n_vertices
    coloring = [-1] * n_vertices
    components: list[tuple[int, ...]] = []
    bipartite_flags: list[bool] = []
    for start in range(n_vertices):
        if component_of[start] >= 0:
            continue
        comp_id = len(components)
        members = []
        ok = True
        component_of[start] = comp_id
        coloring[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            members.append(v)
            for w, _ in adjacency[v]:
                if component_of[w] < 0:
                    component_of[w] = comp_id
                    coloring[w] = 1 - coloring[v]
                    queue.append(w)
                elif coloring[w] == coloring[v]:
                    ok = False
        components.append(tuple(sorted(members)))
        bipartite_flags.append(ok)

    return AuxiliaryGraph(
        graph=graph,
        sectorization=sigma,
        vertices=tuple(vertices),
        vertex_offset=tuple(vertex_offset),
        sector_counts=tuple(sector_counts),
        edges=tuple(aux_edges),
        vertex_of_position=tuple(vertex_of_position),
        adjacency=tuple(tuple(sorted(adj)) for adj in adjacency),
        components=tuple(components),
        component_of=tuple(component_of),
        bipartite_flags=tuple(bipartite_flags),
        coloring=tuple(coloring),
    )


@dataclass(frozen=True)
class BipartiteDecomposition:
    components: tuple[tuple[int, ...], ...]
    bipartite_flags: tuple[bool, ...]
    coloring: tuple[int, ...]
    all_bipartite: bool
    nonempty_component_count: int
    sector_pair_of_edge: tuple[tuple[int, int], ...] | None
    sector_pairing_consistent: bool | None
    nonempty_class_count: int | None


def bipartite_decomposition(aux: AuxiliaryGraph) -> BipartiteDecomposition:
    """Components with 2-coloring certificates.

    For a homogeneous K-sector layout this additionally classifies each
    edge by its unordered sector pair and reports whether every edge
    joins sector k to sector (k + K/2) mod K. The K/2 possible classes
    induce vertex-disjoint subgraphs, so at most K/2 of them are
    nonempty; connected components refine the classes and can be more
    numerous on sparse graphs.
    """
    kind = aux.sectorization.kind
    sector_pair_of_edge = None
    pairing_consistent = None
    nonempty_class_count = None
    if isinstance(kind, EvenHomogeneous):
        half = kind.n_sectors // 2
        pairs = []
        pairing_consistent = True
        for va, vb in aux.edges:
            ka = aux.vertices[va][1]
            kb = aux.vertices[vb][1]
            if kb != (ka + half) % kind.n_sectors:
                pairing_consistent = False
            pairs.append((min(ka, kb), max(ka, kb)))
        sector_pair_of_edge = tuple(pairs)
        nonempty_class_count = len(set(pairs))
    return BipartiteDecomposition(
        components=aux.components,
        bipartite_flags=aux.bipartite_flags,
        coloring=aux.coloring,
        all_bipartite=aux.all_bipartite(),
        nonempty_component_count=aux.nonempty_component_count(),
        sector_pair_of_edge=sector_pair_of_edge,
        sector_pairing_consistent=pairing_consistent,
        nonempty_class_count=nonempty_class_count,
    )


def schedule_is_matching(
    schedule: set[tuple[int, int]], aux: AuxiliaryGraph
) -> bool:
    """True iff the directed links occupy each sector-vertex at most once."""
    edge_index = {edge: eid for eid, edge in enumerate(aux.graph.edges)}
    used: set[int] = set()
    for n, m in schedule:
        key = (min(n, m), max(n, m))
        if key not in edge_index:
            raise UnknownLinkError(f"link {n}->{m} is not in the graph")
        va, vb = aux.edges[edge_index[key]]
        if va in used or vb in used:
            return False
        used.add(va)
        used.add(vb)
    return True


def dot_export(aux: AuxiliaryGraph) -> str:
    """Graphviz document with component clusters and bipartition fills."""
    lines = ["graph auxiliary {", "  node [style=filled];"]
    for comp_id, comp in enumerate(aux.components):
        lines.append(f"  subgraph cluster_{comp_id} {{")
        label = "bipartite" if aux.bipartite_flags[comp_id] else "odd"
        lines.append(f'    label="component {comp_id} ({label})";')
        for v in comp:
            node, k = aux.vertices[v]
            fill = "lightblue" if aux.coloring[v] == 0 else "lightyellow"
            lines.append(
                f'    v{v} [label="{node}.s{k}", fillcolor="{fill}"];'
            )
        lines.append("  }")
    for eid, (va, vb) in enumerate(aux.edges):
        a, b = aux.graph.edges[eid]
        lines.append(f'  v{va} -- v{vb} [label="{a}-{b}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
