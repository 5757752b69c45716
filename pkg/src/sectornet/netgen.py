"""Network geometry generation and angular measurements.

Builds random geometric graphs on the unit square and regular grid
networks. Each node carries a cyclic ordering of its incident edges by
the bearing of the far endpoint, which is the substrate every
sectorization operates on. ``theta_threshold`` reports the narrowest
angular gap between consecutive incident edges anywhere in the network.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGeometryError, MalformedInputError


@dataclass(frozen=True)
class NetworkGeometry:
    """Node coordinates in the unit square plus the communication range.

    ``comm_range_2r`` is the center-to-center distance below which two
    nodes are connected (strictly less than; ties are excluded so the
    edge set is stable under re-serialization).
    """

    node_positions: tuple[tuple[float, float], ...]
    comm_range_2r: float
    rng_seed: int | None = None

    def __post_init__(self) -> None:
        for x, y in self.node_positions:
            if not (0.0 <= x <= 1.0 and 0.0 <= y <= 1.0):
                raise InvalidGeometryError(
                    f"node position ({x}, {y}) outside the unit square"
                )
        if not self.comm_range_2r > 0.0:
            raise InvalidGeometryError("communication range must be positive")

    def positions_array(self) -> np.ndarray:
        return np.asarray(self.node_positions, dtype=np.float64)


@dataclass(frozen=True)
class ConnectivityGraph:
    """Undirected connectivity with per-node cyclic incidence orders.

    ``edges`` is deduplicated, stored as (a, b) with a < b, and sorted
    lexicographically; edge indices into this list are the canonical
    edge ids used throughout the package. ``incident_edges[n]`` lists
    the edge ids at node n in cyclic order of the neighbor's bearing
    (ascending degrees in [0, 360), ties broken by neighbor id), and
    ``incident_bearings[n]`` is the parallel list of those bearings.
    """

    n_nodes: int
    edges: tuple[tuple[int, int], ...]
    incident_edges: tuple[tuple[int, ...], ...] = field(repr=False)
    incident_bearings: tuple[tuple[float, ...], ...] = field(repr=False)

    def degree(self, node: int) -> int:
        return len(self.incident_edges[node])

    def other_end(self, edge_id: int, node: int) -> int:
        a, b = self.edges[edge_id]
        if node == a:
            return b
        if node == b:
            return a
        raise ValueError(f"edge {edge_id} is not incident to node {node}")

    def directed_links(self) -> list[tuple[int, int]]:
        """Both orientations of every undirected edge."""
        links: list[tuple[int, int]] = []
        for a, b in self.edges:
            links.append((a, b))
            links.append((b, a))
        return links

    def max_degree(self) -> int:
        if self.n_nodes == 0:
            return 0
        return max(len(inc) for inc in self.incident_edges)


def bearing_degrees(dx: float, dy: float) -> float:
    """Bearing of the vector (dx, dy) in degrees in [0, 360)."""
    return math.degrees(math.atan2(dy, dx)) % 360.0


def _edges_from_positions(pos: np.ndarray, comm_range: float) -> list[tuple[int, int]]:
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    mask = np.triu(dist < comm_range, k=1)
    a_idx, b_idx = np.nonzero(mask)
    return sorted(zip(a_idx.tolist(), b_idx.tolist()))


def connectivity_from_edges(
    pos: np.ndarray, edges: list[tuple[int, int]]
) -> ConnectivityGraph:
    """Assemble the cyclic incidence structure for a given edge list."""
    n = pos.shape[0]
    canonical = sorted((min(a, b), max(a, b)) for a, b in edges)
    for a, b in canonical:
        if a == b:
            raise MalformedInputError(f"self-loop on node {a}")
        if not (0 <= a < n and 0 <= b < n):
            raise MalformedInputError(f"edge ({a}, {b}) references a missing node")
    if len(set(canonical)) != len(canonical):
        raise MalformedInputError("duplicate edges in edge list")

    per_node: list[list[tuple[float, int, int]]] = [[] for _ in range(n)]
    for eid, (a, b) in enumerate(canonical):
        bearing_ab = bearing_degrees(pos[b, 0] - pos[a, 0], pos[b, 1] - pos[a, 1])
        bearing_ba = (bearing_ab + 180.0) % 360.0
        per_node[a].append((bearing_ab, b, eid))
        per_node[b].append((bearing_ba, a, eid))

    incident_edges: list[tuple[int, ...]] = []
    incident_bearings: list[tuple[float, ...]] = []
    for entries in per_node:
        entries.sort()
        incident_edges.append(tuple(eid for _, _, eid in entries))
        incident_bearings.append(tuple(bearing for bearing, _, _ in entries))

    return ConnectivityGraph(
        n_nodes=n,
        edges=tuple(canonical),
        incident_edges=tuple(incident_edges),
        incident_bearings=tuple(incident_bearings),
    )


def build_connectivity(geometry: NetworkGeometry) -> ConnectivityGraph:
    """Apply the distance predicate and assemble the incidence structure."""
    pos = geometry.positions_array()
    return connectivity_from_edges(pos, _edges_from_positions(pos, geometry.comm_range_2r))


def random_geometric(
    n_nodes: int, comm_range_2r: float, seed: int
) -> tuple[NetworkGeometry, ConnectivityGraph]:
    """Uniform node placement on the unit square; connect nodes closer
    than ``comm_range_2r``. Deterministic for a fixed seed; isolated
    nodes are permitted."""
    if n_nodes < 2:
        raise InvalidGeometryError("need at least 2 nodes")
    if not (0.0 < comm_range_2r <= math.sqrt(2.0)):
        raise InvalidGeometryError("communication range must be in (0, sqrt(2)]")
    rng = np.random.default_rng(seed)
    pos = rng.random((n_nodes, 2))
    geometry = NetworkGeometry(
        node_positions=tuple(map(tuple, pos.tolist())),
        comm_range_2r=float(comm_range_2r),
        rng_seed=int(seed),
    )
    return geometry, build_connectivity(geometry)


def grid_network(
    rows: int, cols: int, with_diagonals: bool = False
) -> tuple[NetworkGeometry, ConnectivityGraph]:
    """Regular lattice scaled into the unit square.

    The communication range is set relative to the lattice spacing so
    the distance predicate reproduces exactly the 4 axis neighbors and,
    when flagged, the 4 diagonal neighbors.
    """
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise InvalidGeometryError("grid needs at least 2 nodes")
    spacing = 1.0 / (max(rows, cols) - 1)
    positions = []
    for r in range(rows):
        for c in range(cols):
            positions.append((c * spacing, r * spacing))
    comm_range = (1.5 if with_diagonals else 1.2) * spacing
    geometry = NetworkGeometry(
        node_positions=tuple(positions), comm_range_2r=comm_range, rng_seed=None
    )
    return geometry, build_connectivity(geometry)


def node_min_gap(graph: ConnectivityGraph, node: int) -> float:
    """Minimum angular gap between consecutive incident edges at one
    node; +inf for degree <= 1."""
    bearings = graph.incident_bearings[node]
    d = len(bearings)
    if d < 2:
        return math.inf
    gaps = [bearings[i + 1] - bearings[i] for i in range(d - 1)]
    gaps.append(bearings[0] + 360.0 - bearings[d - 1])
    return min(gaps)


def theta_threshold(graph: ConnectivityGraph) -> float:
    """Narrowest angular gap between consecutive incident edges over
    all nodes; +inf sentinel if no node has degree >= 2."""
    return min(
        (node_min_gap(graph, n) for n in range(graph.n_nodes)), default=math.inf
    )


def network_to_json(geometry: NetworkGeometry, graph: ConnectivityGraph) -> dict:
    return {
        "nodes": [
            {"id": i, "x": x, "y": y}
            for i, (x, y) in enumerate(geometry.node_positions)
        ],
        "range_2R": geometry.comm_range_2r,
        "edges": [[a, b] for a, b in graph.edges],
    }


def network_from_json(obj: dict) -> tuple[NetworkGeometry, ConnectivityGraph]:
    """Rebuild geometry and incidence structure from the JSON form.

    The stored edge list is taken as-is (it is not re-derived from the
    distance predicate), so hand-edited networks round-trip faithfully.
    """
    try:
        nodes = obj["nodes"]
        comm_range = float(obj["range_2R"])
        edges = [(int(a), int(b)) for a, b in obj["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedInputError(f"bad network document: {exc}") from exc
    by_id = {}
    for entry in nodes:
        try:
            by_id[int(entry["id"])] = (float(entry["x"]), float(entry["y"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad node entry {entry!r}") from exc
    if sorted(by_id) != list(range(len(by_id))):
        raise MalformedInputError("node ids must be 0..N-1")
    positions = tuple(by_id[i] for i in range(len(by_id)))
    geometry = NetworkGeometry(node_positions=positions, comm_range_2r=comm_range)
    graph = connectivity_from_edges(geometry.positions_array(), edges)
    return geometry, graph


def save_network(path: str, geometry: NetworkGeometry, graph: ConnectivityGraph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_json(geometry, graph), fh, indent=2)
        fh.write("\n")


def load_network(path: str) -> tuple[NetworkGeometry, ConnectivityGraph]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedInputError(f"bad JSON in {path}: {exc}") from exc
    return network_from_json(obj)
