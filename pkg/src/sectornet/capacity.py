"""Flow-extension ratios, sectorization gains, and polytope checks.

Central question: given per-link flows, by what factor can they be
scaled before some scheduling constraint of the auxiliary graph binds?
Two ratios answer it. mu_extension inverts the heaviest per-vertex flow
load. zeta_oddsets sweeps odd vertex subsets, whose induced flow may
bind first on non-bipartite graphs. lambda_extension combines both into
the largest safe scale factor, falling back to a guaranteed interval
when the odd-set sweep would be too large. The remaining operations
derive gains of one sectorization over none, a lower bound on how far
the distributed optimizer can sit from the true optimum, membership
tests for the two scheduling polytopes, and a multi-commodity flow
balance audit.

Every sum over edge sets here accumulates in ascending edge-id order.
Floating-point sums taken in one shared order are monotone under adding
edges, which keeps subset-versus-superset comparisons (and therefore
the monotonicity guarantees between sectorized and unsectorized runs)
exact rather than tolerance-based.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .auxgraph import AuxiliaryGraph, build_auxiliary
from .errors import (
    MalformedInputError,
    UnknownLinkError,
    VertexLimitExceededError,
    ZeroFlowError,
)
from .netgen import ConnectivityGraph
from .sectorization import NetworkSectorization, unsectorized

ODDSET_VERTEX_LIMIT = 18
RELATIVE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Unknown:
    """Marker for a value the guarded enumeration did not compute."""


@dataclass(frozen=True)
class Interval:
    """Closed range certified to contain a value not computed exactly."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (self.lo <= self.hi):
            raise ValueError(f"empty interval [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class FlowVector:
    """Per-direction link flows for one connectivity graph.

    Entry 2*e holds the flow along edge e from its lower-numbered node
    to the higher one, entry 2*e+1 the reverse direction. Undirected
    flow per edge is the sum of its two directions.
    """

    directed: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.directed) % 2:
            raise ValueError("directed flows come in pairs per edge")
        for f in self.directed:
            if not math.isfinite(f) or f < 0:
                raise ValueError(f"flow {f} is not finite and nonnegative")

    @property
    def n_edges(self) -> int:
        return len(self.directed) // 2

    def undirected(self, edge_id: int) -> float:
        return self.directed[2 * edge_id] + self.directed[2 * edge_id + 1]

    def undirected_all(self) -> tuple[float, ...]:
        return tuple(self.undirected(e) for e in range(self.n_edges))

    def max_undirected(self) -> float:
        best = 0.0
        for e in range(self.n_edges):
            f = self.undirected(e)
            if f > best:
                best = f
        return best

    def scaled(self, factor: float) -> "FlowVector":
        return FlowVector(tuple(factor * f for f in self.directed))

    @staticmethod
    def from_undirected(values: Sequence[float]) -> "FlowVector":
        """Even split of per-edge flows into the two directions."""
        directed = []
        for f in values:
            directed.append(f / 2.0)
            directed.append(f / 2.0)
        return FlowVector(tuple(directed))


@dataclass(frozen=True)
class ArrivalMatrix:
    """Per (source, commodity) packet arrival rates, zero diagonal."""

    rates: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        n = len(self.rates)
        for i, row in enumerate(self.rates):
            if len(row) != n:
                raise ValueError("arrival matrix must be square")
            for j, a in enumerate(row):
                if not math.isfinite(a) or a < 0:
                    raise ValueError(
                        f"arrival rate ({i}, {j}) is not finite nonnegative"
                    )
                if i == j and a != 0:
                    raise ValueError(f"diagonal entry ({i}, {i}) must be 0")

    @property
    def n_nodes(self) -> int:
        return len(self.rates)

    @staticmethod
    def uniform(n_nodes: int, rate: float) -> "ArrivalMatrix":
        return ArrivalMatrix(
            tuple(
                tuple(0.0 if i == j else rate for j in range(n_nodes))
                for i in range(n_nodes)
            )
        )


@dataclass(frozen=True)
class ExtensionReport:
    """Scaling headroom of one flow vector on one auxiliary graph."""

    mu: float
    zeta: float | Unknown
    lam: float | Interval
    witness_vertex: int
    witness_odd_set: tuple[int, ...] | None
    exact: bool


def _vertex_loads(aux: AuxiliaryGraph, edge_flows: Sequence[float]) -> list[float]:
    loads = []
    for adj in aux.adjacency:
        total = 0.0
        for eid in sorted(e for _, e in adj):
            total += edge_flows[eid]
        loads.append(total)
    return loads


def mu_extension(
    aux: AuxiliaryGraph, flow: FlowVector
) -> tuple[float, int]:
    """Inverse of the heaviest per-vertex flow load, with an argmax
    vertex (ties resolved to the lowest vertex id)."""
    flows = flow.undirected_all()
    _require_flow(aux, flows)
    loads = _vertex_loads(aux, flows)
    witness = 0
    best = loads[0] if loads else 0.0
    for v in range(1, len(loads)):
        if loads[v] > best:
            best = loads[v]
            witness = v
    return 1.0 / best, witness


def _require_flow(aux: AuxiliaryGraph, flows: Sequence[float]) -> None:
    if len(flows) != len(aux.edges):
        raise ValueError(
            f"flow vector covers {len(flows)} edges, graph has "
            f"{len(aux.edges)}"
        )
    if not any(f > 0 for f in flows):
        raise ZeroFlowError("flow vector is identically zero")


def _active_vertices(
    aux: AuxiliaryGraph, flows: Sequence[float]
) -> list[int]:
    """Vertices with at least one incident flow-carrying edge.

    A vertex whose incident edges all carry zero flow can only enlarge
    an odd set without changing its induced flow, which never tightens
    the binding ratio below the per-vertex bound; the sweep skips such
    vertices."""
    active = []
    for v in range(aux.n_vertices):
        if any(flows[eid] > 0 for _, eid in aux.adjacency[v]):
            active.append(v)
    return active


def zeta_oddsets(
    aux: AuxiliaryGraph,
    flow: FlowVector,
    vertex_limit: int = ODDSET_VERTEX_LIMIT,
) -> tuple[float | Unknown, tuple[int, ...] | None]:
    """Minimum over odd vertex subsets of half the subset size divided
    by its induced flow, with a minimizing subset.

    Returns (inf, None) when no odd subset carries positive flow, and
    (Unknown(), None) when more than vertex_limit vertices carry flow.
    """
    flows = flow.undirected_all()
    if len(flows) != len(aux.edges):
        raise ValueError(
            f"flow vector covers {len(flows)} edges, graph has "
            f"{len(aux.edges)}"
        )
    active = _active_vertices(aux, flows)
    d = len(active)
    if d > vertex_limit:
        return Unknown(), None
    if d < 3:
        return math.inf, None

    index_of = {v: i for i, v in enumerate(active)}
    n_subsets = 1 << d
    subset_ids = np.arange(n_subsets, dtype=np.int64)
    sums = np.zeros(n_subsets, dtype=np.float64)
    for eid in range(len(aux.edges)):
        if flows[eid] <= 0:
            continue
        va, vb = aux.edges[eid]
        if va not in index_of or vb not in index_of:
            continue
        mask = (1 << index_of[va]) | (1 << index_of[vb])
        sums[(subset_ids & mask) == mask] += flows[eid]

    sizes = np.zeros(n_subsets, dtype=np.int64)
    for bit in range(d):
        sizes += (subset_ids >> bit) & 1

    candidates = (sizes % 2 == 1) & (sizes >= 3) & (sums > 0)
    if not candidates.any():
        return math.inf, None
    ratios = np.full(n_subsets, np.inf)
    ratios[candidates] = (sizes[candidates] // 2) / sums[candidates]
    best = int(ratios.argmin())
    witness = tuple(active[i] for i in range(d) if best >> i & 1)
    return float(ratios[best]), witness


def lambda_extension(
    aux: AuxiliaryGraph,
    flow: FlowVector,
    vertex_limit: int = ODDSET_VERTEX_LIMIT,
) -> ExtensionReport:
    """Largest scale factor keeping the flow inside the scheduling
    polytope, with witnesses.

    On a bipartite auxiliary graph the per-vertex bound is the whole
    answer. Otherwise the odd-set sweep refines it; when the sweep is
    guarded off, the result degrades to the certified interval
    [2/3 * mu, mu] instead of failing.
    """
    mu, witness_vertex = mu_extension(aux, flow)
    zeta, witness_odd = zeta_oddsets(aux, flow, vertex_limit)

    if aux.all_bipartite():
        return ExtensionReport(
            mu=mu,
            zeta=zeta,
            lam=mu,
            witness_vertex=witness_vertex,
            witness_odd_set=witness_odd,
            exact=True,
        )
    if isinstance(zeta, Unknown):
        return ExtensionReport(
            mu=mu,
            zeta=zeta,
            lam=Interval(lo=2.0 / 3.0 * mu, hi=mu),
            witness_vertex=witness_vertex,
            witness_odd_set=None,
            exact=False,
        )
    return ExtensionReport(
        mu=mu,
        zeta=zeta,
        lam=min(mu, zeta),
        witness_vertex=witness_vertex,
        witness_odd_set=witness_odd,
        exact=True,
    )


def gains(
    graph: ConnectivityGraph,
    sigma: NetworkSectorization,
    flow: FlowVector,
    vertex_limit: int = ODDSET_VERTEX_LIMIT,
) -> tuple[float | Interval, float]:
    """Capacity gain pair of a sectorization over leaving the network
    unsectorized: the scale-factor ratio (interval-propagating when
    either side is inexact) and the per-vertex-bound ratio."""
    sectorized = lambda_extension(
        build_auxiliary(graph, sigma), flow, vertex_limit
    )
    plain = lambda_extension(
        build_auxiliary(graph, unsectorized(graph)), flow, vertex_limit
    )
    g_mu = sectorized.mu / plain.mu

    s_lo, s_hi = _as_interval(sectorized.lam)
    p_lo, p_hi = _as_interval(plain.lam)
    if s_lo == s_hi and p_lo == p_hi:
        g_lambda: float | Interval = s_lo / p_lo
    else:
        g_lambda = Interval(lo=s_lo / p_hi, hi=s_hi / p_lo)
    return g_lambda, g_mu


def _as_interval(value: float | Interval) -> tuple[float, float]:
    if isinstance(value, Interval):
        return value.lo, value.hi
    return value, value


def lb_bound(mu_pi: float, flow: FlowVector) -> float:
    """Guaranteed lower bound on the distributed optimizer's
    approximation ratio: 1 / (1 + mu_pi * heaviest undirected flow)."""
    if mu_pi <= 0:
        raise ValueError(f"mu must be positive, got {mu_pi}")
    return 1.0 / (1.0 + mu_pi * flow.max_undirected())


def in_polytope(
    edge_values: Sequence[float],
    aux: AuxiliaryGraph,
    which: str = "integral",
    vertex_limit: int = ODDSET_VERTEX_LIMIT,
    rtol: float = RELATIVE_TOLERANCE,
) -> bool:
    """Membership of a per-edge vector in a scheduling polytope.

    which="fractional" checks nonnegativity and per-vertex sums <= 1.
    which="integral" additionally checks every odd-subset induced sum
    against half the subset size, which on bipartite graphs is implied
    and skipped. Raises VertexLimitExceededError when the odd-set check
    is required but more than vertex_limit vertices carry positive
    values.
    """
    if which not in ("integral", "fractional"):
        raise ValueError(f"unknown polytope {which!r}")
    if len(edge_values) != len(aux.edges):
        raise ValueError(
            f"vector covers {len(edge_values)} edges, graph has "
            f"{len(aux.edges)}"
        )
    for x in edge_values:
        if not math.isfinite(x):
            raise ValueError(f"entry {x} is not finite")
        if x < -rtol:
            return False

    loads = _vertex_loads(aux, edge_values)
    for load in loads:
        if load > 1.0 + rtol:
            return False

    if which == "fractional" or aux.all_bipartite():
        return True

    active = _active_vertices(aux, edge_values)
    if len(active) > vertex_limit:
        raise VertexLimitExceededError(
            f"{len(active)} vertices carry positive values, "
            f"limit is {vertex_limit}"
        )
    if len(active) < 3:
        return True

    index_of = {v: i for i, v in enumerate(active)}
    d = len(active)
    n_subsets = 1 << d
    subset_ids = np.arange(n_subsets, dtype=np.int64)
    sums = np.zeros(n_subsets, dtype=np.float64)
    for eid in range(len(aux.edges)):
        if edge_values[eid] <= 0:
            continue
        va, vb = aux.edges[eid]
        if va not in index_of or vb not in index_of:
            continue
        mask = (1 << index_of[va]) | (1 << index_of[vb])
        sums[(subset_ids & mask) == mask] += edge_values[eid]
    sizes = np.zeros(n_subsets, dtype=np.int64)
    for bit in range(d):
        sizes += (subset_ids >> bit) & 1
    odd = sizes % 2 == 1
    caps = (sizes[odd] // 2).astype(np.float64)
    return bool((sums[odd] <= caps * (1.0 + rtol) + rtol).all())


@dataclass(frozen=True)
class ConservationReport:
    """Outcome of the multi-commodity balance audit."""

    valid: bool
    violation: str | None
    residual: float


def validate_flow_conservation(
    graph: ConnectivityGraph,
    alpha: ArrivalMatrix,
    link_commodity_flows: Mapping[tuple[int, int, int], float],
) -> ConservationReport:
    """Audit per-commodity routing flows against arrivals.

    ``link_commodity_flows`` maps (from_node, to_node, commodity) to a
    rate; absent keys mean zero. Checks, in order: nonnegativity, per
    (node, commodity) balance at non-destination nodes, net inflow at
    each destination matching its total arrivals, and per directed link
    a total across commodities of at most 1. Reports the first
    violation instead of raising.
    """
    n = graph.n_nodes
    if alpha.n_nodes != n:
        return ConservationReport(
            valid=False,
            violation=f"arrival matrix covers {alpha.n_nodes} nodes, "
            f"graph has {n}",
            residual=math.nan,
        )
    links = set(graph.directed_links())
    tol = 1e-9

    for (a, b, c), f in sorted(link_commodity_flows.items()):
        if (a, b) not in links:
            return ConservationReport(
                valid=False,
                violation=f"flow on unknown link {a}->{b}",
                residual=math.nan,
            )
        if not (0 <= c < n) or c == a:
            return ConservationReport(
                valid=False,
                violation=f"flow on link {a}->{b} for invalid "
                f"commodity {c}",
                residual=math.nan,
            )
        if not math.isfinite(f) or f < 0:
            return ConservationReport(
                valid=False,
                violation=f"flow on link {a}->{b} commodity {c} "
                f"is {f}",
                residual=float(f) if math.isfinite(f) else math.nan,
            )

    def flow(a: int, b: int, c: int) -> float:
        return link_commodity_flows.get((a, b, c), 0.0)

    for c in range(n):
        for node in range(n):
            inflow = sum(
                flow(b, node, c) for (b, t) in sorted(links) if t == node
            )
            outflow = sum(
                flow(node, t, c) for (s, t) in sorted(links) if s == node
            )
            if node == c:
                residual = inflow - outflow - sum(
                    alpha.rates[s][c] for s in range(n)
                )
                if abs(residual) > tol:
                    return ConservationReport(
                        valid=False,
                        violation=f"destination {c} absorbs the wrong "
                        f"total",
                        residual=residual,
                    )
            else:
                residual = outflow - inflow - alpha.rates[node][c]
                if abs(residual) > tol:
                    return ConservationReport(
                        valid=False,
                        violation=f"balance at node {node} for "
                        f"commodity {c}",
                        residual=residual,
                    )

    for a, b in sorted(links):
        total = sum(flow(a, b, c) for c in range(n))
        if total > 1.0 + tol:
            return ConservationReport(
                valid=False,
                violation=f"link {a}->{b} carries {total}",
                residual=total - 1.0,
            )

    return ConservationReport(valid=True, violation=None, residual=0.0)


def flows_to_json(graph: ConnectivityGraph, flow: FlowVector) -> str:
    """Serialize directed flows keyed "a->b", one entry per direction."""
    if flow.n_edges != len(graph.edges):
        raise ValueError("flow vector does not match the graph")
    directed = {}
    for eid, (a, b) in enumerate(graph.edges):
        directed[f"{a}->{b}"] = flow.directed[2 * eid]
        directed[f"{b}->{a}"] = flow.directed[2 * eid + 1]
    return json.dumps({"directed": directed}, indent=2)


def flows_from_json(graph: ConnectivityGraph, text: str) -> FlowVector:
    """Parse either form: directed entries "a->b", or undirected
    entries "a-b" split evenly into the two directions."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or len(doc.keys() & {"directed", "undirected"}) != 1:
        raise MalformedInputError(
            "flow document needs exactly one of 'directed'/'undirected'"
        )
    edge_id = {}
    for eid, (a, b) in enumerate(graph.edges):
        edge_id[(a, b)] = eid
        edge_id[(b, a)] = eid

    directed = [0.0] * (2 * len(graph.edges))
    if "directed" in doc:
        entries = _parse_entries(doc["directed"], "->")
        for (a, b), f in entries:
            if (a, b) not in edge_id:
                raise UnknownLinkError(f"no link {a}->{b} in the graph")
            eid = edge_id[(a, b)]
            lo, _ = graph.edges[eid]
            slot = 2 * eid if a == lo else 2 * eid + 1
            directed[slot] = f
    else:
        entries = _parse_entries(doc["undirected"], "-")
        for (a, b), f in entries:
            if (a, b) not in edge_id:
                raise UnknownLinkError(f"no edge {a}-{b} in the graph")
            eid = edge_id[(a, b)]
            directed[2 * eid] = f / 2.0
            directed[2 * eid + 1] = f / 2.0
    return FlowVector(tuple(directed))


def _parse_entries(
    mapping: object, sep: str
) -> list[tuple[tuple[int, int], float]]:
    if not isinstance(mapping, dict):
        raise MalformedInputError("flow entries must be an object")
    out = []
    for key, value in mapping.items():
        parts = str(key).split(sep)
        if len(parts) != 2:
            raise MalformedInputError(f"bad flow key {key!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise MalformedInputError(f"bad flow key {key!r}") from exc
        try:
            f = float(value)
        except (TypeError, ValueError) as exc:
            raise MalformedInputError(f"bad flow value for {key!r}") from exc
        if not math.isfinite(f) or f < 0:
            raise MalformedInputError(f"flow for {key!r} is {value!r}")
        out.append(((a, b), f))
    return out
