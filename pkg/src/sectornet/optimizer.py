"""Per-node sector search by greedy arc packing under a load threshold.

Each node solves its own problem: split the cyclic incidence order into
at most K contiguous sectors so that the largest per-sector flow sum is
as small as possible. A feasibility check at a fixed threshold walks the
cycle greedily from every candidate first cut; bisection on the
threshold then pins down the critical value. Nodes share nothing, so the
network pass is just the per-node search in any order.

An exhaustive product-space maximizer over all cut sets is provided as
an audit oracle for the greedy; it is guarded because its search space
grows as a product of binomials.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Union

from .auxgraph import build_auxiliary
from .capacity import (
    ODDSET_VERTEX_LIMIT,
    FlowVector,
    Interval,
    lambda_extension,
    mu_extension,
)
from .errors import (
    SearchSpaceTooLargeError,
    VertexLimitExceededError,
    ZeroFlowError,
)
from .netgen import ConnectivityGraph
from .sectorization import (
    General,
    NetworkSectorization,
    NodeSectorization,
    sector_arcs,
)

BRUTE_FORCE_MAX_PRODUCT = 10**6


@dataclass(frozen=True)
class NodeFlowProfile:
    """A node's local flow view: undirected per-edge sums in the node's
    cyclic incidence order."""

    node: int
    edge_ids: tuple[int, ...]
    flows: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.edge_ids) != len(self.flows):
            raise ValueError("edge_ids and flows must be parallel")
        for f in self.flows:
            if not math.isfinite(f) or f < 0.0:
                raise ValueError(f"flows must be finite and >= 0, got {f}")

    @property
    def degree(self) -> int:
        return len(self.flows)

    @staticmethod
    def from_flow(
        graph: ConnectivityGraph, node: int, flow: FlowVector
    ) -> "NodeFlowProfile":
        eids = graph.incident_edges[node]
        return NodeFlowProfile(
            node=node,
            edge_ids=eids,
            flows=tuple(flow.undirected(e) for e in eids),
        )


@dataclass(frozen=True)
class SectorizeResult:
    cuts: NodeSectorization
    t_crit: float
    iterations: int


@dataclass(frozen=True)
class NetworkSectorizeResult:
    sigma: NetworkSectorization
    mu_pi: float
    per_node: dict[int, SectorizeResult]


def exist_sectorization_n(
    profile: NodeFlowProfile, n_sectors_cap: int, threshold: float
) -> tuple[bool, NodeSectorization | None]:
    """Can the cyclic flows be split into <= cap contiguous sectors,
    each summing to at most the threshold?

    Tries every incidence position as the first cut: place a cut right
    after the start edge, then walk the full cycle accumulating flows,
    cutting before any edge that would push the running sum over the
    threshold. Returns the cut set of the first start that fits.
    """
    if n_sectors_cap < 1:
        raise ValueError("sector cap must be >= 1")
    if not math.isfinite(threshold) or threshold < 0.0:
        raise ValueError("threshold must be finite and >= 0")
    d = profile.degree
    if d == 0:
        return True, NodeSectorization(
            node=profile.node, cuts=(), sector_cap=n_sectors_cap
        )
    flows = profile.flows
    if max(flows) > threshold:
        return False, None
    for start in range(d):
        cuts = [start]
        running = 0.0
        for step in range(1, d + 1):
            pos = (start + step) % d
            fe = flows[pos]
            if running + fe > threshold:
                cuts.append((pos - 1) % d)
                running = fe
            else:
                running += fe
        if len(cuts) <= n_sectors_cap:
            return True, NodeSectorization(
                node=profile.node,
                cuts=tuple(sorted(cuts)),
                sector_cap=n_sectors_cap,
            )
    return False, None


def achieved_max_sector_sum(
    profile: NodeFlowProfile, cuts: NodeSectorization
) -> float:
    """Largest per-sector flow sum under the given cuts.

    Each sector is summed in ascending undirected edge id order, the
    same order the capacity measures use for vertex loads, so the two
    agree bit for bit.
    """
    if profile.degree == 0:
        return 0.0
    worst = 0.0
    for arc in sector_arcs(cuts.cuts, profile.degree):
        total = 0.0
        for pos in sorted(arc, key=lambda p: profile.edge_ids[p]):
            total += profile.flows[pos]
        worst = max(worst, total)
    return worst


def _walk_total(flows: tuple[float, ...], start: int) -> float:
    d = len(flows)
    total = 0.0
    for step in range(1, d + 1):
        total += flows[(start + step) % d]
    return total


def sectorize_n(
    profile: NodeFlowProfile,
    n_sectors_cap: int,
    epsilon: float | None = None,
) -> SectorizeResult:
    """Bisect the threshold to its critical value and return the cuts.

    The search interval runs from the largest single flow to the total;
    the loop halves it until its width is at most epsilon (default:
    1e-9 of the initial width), then takes the decision at the upper
    end. The reported t_crit is snapped to the max sector sum actually
    achieved by the returned cuts, so it is exactly a contiguous-arc
    sum rather than a bisection endpoint.
    """
    if profile.degree == 0 or max(profile.flows) <= 0.0:
        raise ZeroFlowError(
            f"node {profile.node} has no positive flow to sectorize"
        )
    if epsilon is not None and not epsilon > 0.0:
        raise ValueError("epsilon must be positive")
    t_lo = max(profile.flows)
    # The upper endpoint is the worst full-cycle running total over all
    # starts, so the opening decision is feasible under the exact
    # summation order the greedy walk uses.
    t_hi = max(
        _walk_total(profile.flows, s) for s in range(profile.degree)
    )
    t_hi = max(t_hi, t_lo)
    eps = 1e-9 * (t_hi - t_lo) if epsilon is None else epsilon
    iterations = 0
    while (t_hi - t_lo) > eps:
        mid = 0.5 * (t_lo + t_hi)
        if mid <= t_lo or mid >= t_hi:
            break
        yes, _ = exist_sectorization_n(profile, n_sectors_cap, mid)
        if yes:
            t_hi = mid
        else:
            t_lo = mid
        iterations += 1
    yes, cuts = exist_sectorization_n(profile, n_sectors_cap, t_hi)
    assert yes and cuts is not None
    return SectorizeResult(
        cuts=cuts,
        t_crit=achieved_max_sector_sum(profile, cuts),
        iterations=iterations,
    )


SectorCaps = Union[int, Mapping[int, int]]


def _cap_of(sector_caps: SectorCaps, node: int) -> int:
    cap = (
        sector_caps
        if isinstance(sector_caps, int)
        else sector_caps[node]
    )
    if cap < 1:
        raise ValueError(f"sector cap for node {node} must be >= 1")
    return cap


def sectorize_network(
    graph: ConnectivityGraph,
    flow: FlowVector,
    sector_caps: SectorCaps,
    epsilon: float | None = None,
) -> NetworkSectorizeResult:
    """Run the per-node threshold search independently at every node.

    Nodes without edges get an empty layout; nodes whose local flows
    are all zero keep the canonical single cut, since no split can
    change any load there. The result carries the achieved inverse
    worst load of the whole network.
    """
    if flow.n_edges != len(graph.edges):
        raise ValueError("flow vector does not match the graph")
    per_node: dict[int, NodeSectorization] = {}
    results: dict[int, SectorizeResult] = {}
    for node in range(graph.n_nodes):
        cap = _cap_of(sector_caps, node)
        d = graph.degree(node)
        if d == 0:
            per_node[node] = NodeSectorization(
                node=node, cuts=(), sector_cap=cap
            )
            continue
        profile = NodeFlowProfile.from_flow(graph, node, flow)
        if max(profile.flows) <= 0.0:
            per_node[node] = NodeSectorization(
                node=node, cuts=(0,), sector_cap=cap
            )
            results[node] = SectorizeResult(
                cuts=per_node[node], t_crit=0.0, iterations=0
            )
            continue
        res = sectorize_n(profile, cap, epsilon)
        per_node[node] = res.cuts
        results[node] = res
    sigma = NetworkSectorization(per_node=per_node, kind=General())
    aux = build_auxiliary(graph, sigma)
    mu_pi, _ = mu_extension(aux, flow)
    return NetworkSectorizeResult(sigma=sigma, mu_pi=mu_pi, per_node=results)


def _cut_set_options(degree: int, cap: int) -> list[tuple[int, ...]]:
    if degree == 0:
        return [()]
    options: list[tuple[int, ...]] = []
    for j in range(1, min(degree, cap) + 1):
        options.extend(itertools.combinations(range(degree), j))
    return options


def brute_force_search_size(
    graph: ConnectivityGraph, sector_caps: SectorCaps
) -> int:
    size = 1
    for node in range(graph.n_nodes):
        d = graph.degree(node)
        cap = _cap_of(sector_caps, node)
        per = sum(math.comb(d, j) for j in range(1, min(d, cap) + 1)) if d else 1
        size *= per
    return size


def brute_force_opt(
    graph: ConnectivityGraph,
    flow: FlowVector,
    sector_caps: SectorCaps,
    vertex_limit: int = ODDSET_VERTEX_LIMIT,
) -> tuple[NetworkSectorization, float]:
    """Exhaustive maximizer of the exact throughput scale over every
    combination of per-node cut sets. Audit oracle only.

    Ties go to the first optimum in enumeration order (nodes ascending,
    cut sets by size then lexicographically). Subtrees whose best
    possible inverse worst load cannot beat the incumbent are skipped;
    that prunes only layouts that could at most tie.
    """
    size = brute_force_search_size(graph, sector_caps)
    if size > BRUTE_FORCE_MAX_PRODUCT:
        raise SearchSpaceTooLargeError(
            f"{size} cut-set combinations exceed {BRUTE_FORCE_MAX_PRODUCT}"
        )
    if flow.n_edges != len(graph.edges):
        raise ValueError("flow vector does not match the graph")
    if flow.max_undirected() <= 0.0:
        raise ZeroFlowError("all-zero flow has no optimal layout")

    nodes = list(range(graph.n_nodes))
    options: list[list[tuple[tuple[int, ...], float]]] = []
    for node in nodes:
        d = graph.degree(node)
        cap = _cap_of(sector_caps, node)
        profile = (
            NodeFlowProfile.from_flow(graph, node, flow)
            if d
            else NodeFlowProfile(node=node, edge_ids=(), flows=())
        )
        node_opts = []
        for cuts in _cut_set_options(d, cap):
            layout = NodeSectorization(node=node, cuts=cuts, sector_cap=cap)
            node_opts.append((cuts, achieved_max_sector_sum(profile, layout)))
        options.append(node_opts)
    # Least achievable load per node, for the completion bound.
    floor_after = [0.0] * (len(nodes) + 1)
    for i in range(len(nodes) - 1, -1, -1):
        floor_after[i] = max(
            floor_after[i + 1], min(load for _, load in options[i])
        )

    best_lam = -math.inf
    best_choice: list[tuple[int, ...]] | None = None
    choice: list[tuple[int, ...]] = [()] * len(nodes)

    def descend(i: int, worst_load: float) -> None:
        nonlocal best_lam, best_choice
        bound_load = max(worst_load, floor_after[i])
        if bound_load > 0.0 and 1.0 / bound_load <= best_lam:
            return
        if i == len(nodes):
            sigma = NetworkSectorization(
                per_node={
                    n: NodeSectorization(
                        node=n,
                        cuts=choice[n],
                        sector_cap=_cap_of(sector_caps, n),
                    )
                    for n in nodes
                },
                kind=General(),
            )
            aux = build_auxiliary(graph, sigma)
            report = lambda_extension(aux, flow, vertex_limit=vertex_limit)
            if not report.exact or isinstance(report.lam, Interval):
                raise VertexLimitExceededError(
                    "exhaustive search needs every evaluation exact; "
                    "raise vertex_limit"
                )
            if report.lam > best_lam:
                best_lam = report.lam
                best_choice = list(choice)
            return
        for cuts, load in options[i]:
            choice[i] = cuts
            descend(i + 1, max(worst_load, load))

    descend(0, 0.0)
    assert best_choice is not None
    sigma_star = NetworkSectorization(
        per_node={
            n: NodeSectorization(
                node=n, cuts=best_choice[n], sector_cap=_cap_of(sector_caps, n)
            )
            for n in nodes
        },
        kind=General(),
    )
    return sigma_star, best_lam
