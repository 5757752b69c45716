"""Slotted multi-commodity queue simulator scheduled by weight-maximal
matchings of the sector-vertex graph.

Each slot: queue differentials weight every sector-to-sector edge, a
maximum weight matching picks the served links (independently per
connected component, with the assignment fast path on bipartite
components), served packets hop or exit, then Bernoulli arrivals land.
Longer horizons feed a stability sweep that estimates the largest
arrival rate the network absorbs without linear backlog growth.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .auxgraph import AuxiliaryGraph, build_auxiliary, schedule_is_matching
from .capacity import ArrivalMatrix, FlowVector
from .matching import WeightedGraph, mwm_bipartite, mwm_general
from .netgen import ConnectivityGraph
from .optimizer import sectorize_network
from .sectorization import NetworkSectorization

SLOPE_THRESHOLD_PKT_PER_SLOT = 1e-2
TAIL_FRACTION = 0.2
DEFAULT_BETA = 1e-3
DEFAULT_DYNAMIC_PERIOD = 10_000

SCHEDULER_COMPONENTS = "components"
SCHEDULER_WHOLE_GENERAL = "whole_general"


@dataclass(frozen=True, eq=False)
class QueueState:
    """Per-node, per-commodity packet counts at the start of a slot."""

    q: np.ndarray
    slot: int = 0

    def __post_init__(self) -> None:
        n = self.q.shape[0]
        if self.q.ndim != 2 or self.q.shape[1] != n:
            raise ValueError("queue matrix must be square")
        if (self.q < 0).any():
            raise ValueError("negative backlog")
        if np.diagonal(self.q).any():
            raise ValueError("delivered packets cannot queue at their destination")

    @staticmethod
    def zeros(n_nodes: int) -> "QueueState":
        return QueueState(q=np.zeros((n_nodes, n_nodes), dtype=np.int64))

    def total(self) -> int:
        return int(self.q.sum())


@dataclass(frozen=True)
class SlotSchedule:
    """Links activated in one slot, with the weight vector that chose
    them. ``entries`` lists (edge id, from, to, commodity, weight) in
    ascending edge id order; ``activated`` is the pair set view."""

    entries: tuple[tuple[int, int, int, int, int], ...]
    weights: tuple[int, ...]
    total_weight: int

    @property
    def activated(self) -> frozenset[tuple[tuple[int, int], int]]:
        return frozenset(((frm, to), c) for _, frm, to, c, _ in self.entries)

    def edge_ids(self) -> tuple[int, ...]:
        return tuple(e for e, *_ in self.entries)


@dataclass(frozen=True)
class Fixed:
    """Keep the starting sector layout for the whole run."""


@dataclass(frozen=True)
class DynamicEvery:
    """Re-run the per-node sector search on smoothed served rates every
    ``period`` slots."""

    period: int = DEFAULT_DYNAMIC_PERIOD
    epsilon: float | None = None

    def __post_init__(self) -> None:
        if self.period < 1:
            raise ValueError("period must be >= 1")


SectorPolicy = Union[Fixed, DynamicEvery]


@dataclass(frozen=True)
class SimConfig:
    horizon: int
    alpha: ArrivalMatrix
    policy: SectorPolicy = Fixed()
    seed: int = 0
    beta: float = DEFAULT_BETA
    scheduler: str = SCHEDULER_COMPONENTS

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0.0 < self.beta < 1.0:
            raise ValueError("beta must be in (0, 1)")
        for row in self.alpha.rates:
            for a in row:
                if a > 1.0:
                    raise ValueError("arrival probabilities cannot exceed 1")
        if self.scheduler not in (SCHEDULER_COMPONENTS, SCHEDULER_WHOLE_GENERAL):
            raise ValueError(f"unknown scheduler {self.scheduler!r}")


@dataclass(frozen=True)
class SlotStats:
    schedule: SlotSchedule
    arrived: int
    delivered: int
    mwm_seconds: float
    served_directed: tuple[int, ...]
    empty_serves: int


class Topology:
    """Per-layout scheduling structures reused across slots."""

    def __init__(self, aux: AuxiliaryGraph) -> None:
        self.aux = aux
        m = len(aux.edges)
        self.from_nodes = np.array(
            [aux.vertices[va][0] for va, _ in aux.edges], dtype=np.int64
        )
        self.to_nodes = np.array(
            [aux.vertices[vb][0] for _, vb in aux.edges], dtype=np.int64
        )
        self.components: list[dict] = []
        for comp_id, comp in enumerate(aux.components):
            eids = [
                e
                for e, (va, vb) in enumerate(aux.edges)
                if aux.component_of[va] == comp_id
            ]
            if not eids:
                continue
            local = {v: i for i, v in enumerate(comp)}
            self.components.append(
                {
                    "eids": eids,
                    "n_vertices": len(comp),
                    "local_edges": [
                        (local[aux.edges[e][0]], local[aux.edges[e][1]])
                        for e in eids
                    ],
                    "bipartite": aux.bipartite_flags[comp_id],
                    "coloring": [aux.coloring[v] for v in comp],
                }
            )
        self.whole_edges = list(aux.edges)
        self.n_vertices = aux.n_vertices
        self.m_edges = m


def backpressure_weights(
    queues: QueueState, aux: AuxiliaryGraph, topology: Topology | None = None
) -> tuple[tuple[int, tuple[int, int], int], ...]:
    """Per sector-edge service weight with its best direction and
    commodity.

    The weight is the larger directed queue differential, clamped at 0.
    Ties take the lower commodity id first and then the direction whose
    (from, to) pair is lexicographically smaller.
    """
    topo = Topology(aux) if topology is None else topology
    if topo.m_edges == 0:
        return ()
    q = queues.q
    fwd = q[topo.from_nodes] - q[topo.to_nodes]
    bwd = -fwd
    d_fwd = fwd.max(axis=1)
    d_bwd = bwd.max(axis=1)
    c_fwd = fwd.argmax(axis=1)
    c_bwd = bwd.argmax(axis=1)
    fwd_wins = (d_fwd > d_bwd) | ((d_fwd == d_bwd) & (c_fwd <= c_bwd))
    out = []
    for e in range(topo.m_edges):
        frm = int(topo.from_nodes[e])
        to = int(topo.to_nodes[e])
        if fwd_wins[e]:
            w, c = int(d_fwd[e]), int(c_fwd[e])
        else:
            w, c = int(d_bwd[e]), int(c_bwd[e])
            frm, to = to, frm
        out.append((max(0, w), (frm, to), c))
    return tuple(out)


def schedule_slot(
    weights: tuple[tuple[int, tuple[int, int], int], ...],
    aux: AuxiliaryGraph,
    topology: Topology | None = None,
    scheduler: str = SCHEDULER_COMPONENTS,
) -> SlotSchedule:
    """Pick the served links: a weight-maximal matching per connected
    component (assignment solver on bipartite ones), zero-weight edges
    dropped from the result."""
    topo = Topology(aux) if topology is None else topology
    wvec = tuple(w for w, _, _ in weights)
    chosen: list[int] = []
    if scheduler == SCHEDULER_WHOLE_GENERAL:
        if topo.m_edges and any(wvec):
            g = WeightedGraph(
                n_vertices=topo.n_vertices,
                edges=list(topo.whole_edges),
                weights=[float(w) for w in wvec],
            )
            m = mwm_general(g)
            chosen = [e for e in m.edge_ids if wvec[e] > 0]
    elif scheduler == SCHEDULER_COMPONENTS:
        for comp in topo.components:
            local_w = [float(wvec[e]) for e in comp["eids"]]
            if not any(local_w):
                continue
            g = WeightedGraph(
                n_vertices=comp["n_vertices"],
                edges=list(comp["local_edges"]),
                weights=local_w,
            )
            if comp["bipartite"]:
                m = mwm_bipartite(g, comp["coloring"])
            else:
                m = mwm_general(g)
            chosen.extend(
                comp["eids"][i] for i in m.edge_ids if local_w[i] > 0
            )
    else:
        raise ValueError(f"unknown scheduler {scheduler!r}")
    chosen.sort()
    entries = tuple(
        (e, weights[e][1][0], weights[e][1][1], weights[e][2], wvec[e])
        for e in chosen
    )
    return SlotSchedule(
        entries=entries,
        weights=wvec,
        total_weight=sum(wvec[e] for e in chosen),
    )


def step(
    queues: QueueState,
    aux: AuxiliaryGraph,
    arrivals: ArrivalMatrix,
    rng: np.random.Generator,
    topology: Topology | None = None,
    scheduler: str = SCHEDULER_COMPONENTS,
) -> tuple[QueueState, SlotStats]:
    """Advance one slot: schedule from the current queues, serve one
    packet per activated link (floored at empty), then add arrivals."""
    topo = Topology(aux) if topology is None else topology
    weights = backpressure_weights(queues, aux, topo)
    t0 = time.perf_counter()
    sched = schedule_slot(weights, aux, topo, scheduler)
    mwm_seconds = time.perf_counter() - t0
    q = queues.q.copy()
    delivered = 0
    empty_serves = 0
    served_dirs: list[int] = []
    for eid, frm, to, c, _w in sched.entries:
        if q[frm, c] <= 0:
            empty_serves += 1
            continue
        q[frm, c] -= 1
        if to == c:
            delivered += 1
        else:
            q[to, c] += 1
        a, _b = aux.graph.edges[eid]
        served_dirs.append(2 * eid + (0 if frm == a else 1))
    alpha = np.asarray(arrivals.rates, dtype=np.float64)
    draws = rng.random(alpha.shape)
    landed = (draws < alpha).astype(np.int64)
    q += landed
    arrived = int(landed.sum())
    nxt = QueueState(q=q, slot=queues.slot + 1)
    return nxt, SlotStats(
        schedule=sched,
        arrived=arrived,
        delivered=delivered,
        mwm_seconds=mwm_seconds,
        served_directed=tuple(served_dirs),
        empty_serves=empty_serves,
    )


@dataclass(frozen=True)
class RunTrace:
    slots: np.ndarray
    total_backlog: np.ndarray
    mwm_micros: np.ndarray
    resectorized: np.ndarray
    arrived_cum: np.ndarray
    delivered_cum: np.ndarray
    empty_serves_total: int
    f_hat: FlowVector
    final_queues: QueueState = field(repr=False)
    final_sigma: NetworkSectorization = field(repr=False)

    def total_mwm_seconds(self) -> float:
        return float(self.mwm_micros.sum()) * 1e-6

    def tail_slope(self, tail_fraction: float = TAIL_FRACTION) -> float:
        """Least-squares backlog growth rate over the last slots."""
        n = len(self.slots)
        k = max(2, int(round(n * tail_fraction)))
        xs = self.slots[-k:].astype(np.float64)
        ys = self.total_backlog[-k:].astype(np.float64)
        return float(np.polyfit(xs, ys, 1)[0])

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("slot,total_backlog,mwm_micros,resectorized_flag\n")
            for i in range(len(self.slots)):
                fh.write(
                    f"{int(self.slots[i])},{int(self.total_backlog[i])},"
                    f"{self.mwm_micros[i]:.3f},{int(self.resectorized[i])}\n"
                )


def run(
    config: SimConfig,
    graph: ConnectivityGraph,
    sigma0: NetworkSectorization,
) -> RunTrace:
    """Simulate the full horizon from empty queues.

    Keeps an exponentially smoothed served-rate estimate per directed
    link; under a dynamic policy that estimate feeds the per-node
    sector search every period, after which scheduling continues on the
    rebuilt sector graph. Packet conservation and the matching property
    of every slot's schedule are checked as the run goes; a violation
    raises RuntimeError.
    """
    n = graph.n_nodes
    if len(config.alpha.rates) != n:
        raise ValueError("arrival matrix does not match the node count")
    sigma = sigma0
    aux = build_auxiliary(graph, sigma)
    topo = Topology(aux)
    caps = {node: sigma0.node(node).sector_cap for node in range(n)}
    rng = np.random.default_rng(config.seed)
    horizon = config.horizon
    m2 = 2 * len(graph.edges)
    f_hat = np.zeros(m2, dtype=np.float64)
    slots = np.arange(1, horizon + 1, dtype=np.int64)
    total_backlog = np.zeros(horizon, dtype=np.int64)
    mwm_micros = np.zeros(horizon, dtype=np.float64)
    resect = np.zeros(horizon, dtype=np.uint8)
    arrived_cum = np.zeros(horizon, dtype=np.int64)
    delivered_cum = np.zeros(horizon, dtype=np.int64)
    state = QueueState.zeros(n)
    arrived_total = 0
    delivered_total = 0
    empty_total = 0
    for i in range(horizon):
        state, stats = step(
            state, aux, config.alpha, rng, topo, config.scheduler
        )
        arrived_total += stats.arrived
        delivered_total += stats.delivered
        empty_total += stats.empty_serves
        backlog = state.total()
        if arrived_total != delivered_total + backlog:
            raise RuntimeError(
                f"packet conservation broken at slot {i + 1}: "
                f"{arrived_total} arrived, {delivered_total} delivered, "
                f"{backlog} queued"
            )
        links = {(frm, to) for _, frm, to, _, _ in stats.schedule.entries}
        if len(links) != len(stats.schedule.entries) or not schedule_is_matching(
            links, aux
        ):
            raise RuntimeError(f"schedule is not a matching at slot {i + 1}")
        total_backlog[i] = backlog
        mwm_micros[i] = stats.mwm_seconds * 1e6
        arrived_cum[i] = arrived_total
        delivered_cum[i] = delivered_total
        f_hat *= 1.0 - config.beta
        for d in stats.served_directed:
            f_hat[d] += config.beta
        if (
            isinstance(config.policy, DynamicEvery)
            and (i + 1) % config.policy.period == 0
            and i + 1 < horizon
            and f_hat.max() > 0.0
        ):
            result = sectorize_network(
                graph,
                FlowVector(tuple(f_hat)),
                caps,
                epsilon=config.policy.epsilon,
            )
            sigma = result.sigma
            aux = build_auxiliary(graph, sigma)
            topo = Topology(aux)
            resect[i] = 1
    return RunTrace(
        slots=slots,
        total_backlog=total_backlog,
        mwm_micros=mwm_micros,
        resectorized=resect,
        arrived_cum=arrived_cum,
        delivered_cum=delivered_cum,
        empty_serves_total=empty_total,
        f_hat=FlowVector(tuple(f_hat)),
        final_queues=state,
        final_sigma=sigma,
    )


@dataclass(frozen=True)
class SweepResult:
    alphas: tuple[float, ...]
    final_backlogs: tuple[int, ...]
    tail_slopes: tuple[float, ...]
    mwm_seconds: tuple[float, ...]
    knee: float | None

    def knee_or(self, sentinel: float) -> float:
        return sentinel if self.knee is None else self.knee


def stability_sweep(
    graph: ConnectivityGraph,
    sigma0: NetworkSectorization,
    alpha_grid: list[float],
    horizon: int,
    seed: int,
    policy: SectorPolicy = Fixed(),
    beta: float = DEFAULT_BETA,
    scheduler: str = SCHEDULER_COMPONENTS,
) -> SweepResult:
    """Simulate each uniform arrival rate and locate the stability knee.

    The knee is the largest rate whose tail backlog slope stays under
    the threshold; None means even the smallest rate diverged. Each
    rate reuses the same base seed so paired sweeps see identical
    arrival randomness.
    """
    if list(alpha_grid) != sorted(alpha_grid) or len(set(alpha_grid)) != len(
        alpha_grid
    ):
        raise ValueError("alpha grid must be strictly increasing")
    finals: list[int] = []
    slopes: list[float] = []
    times: list[float] = []
    for alpha in alpha_grid:
        config = SimConfig(
            horizon=horizon,
            alpha=ArrivalMatrix.uniform(graph.n_nodes, alpha),
            policy=policy,
            seed=seed,
            beta=beta,
            scheduler=scheduler,
        )
        trace = run(config, graph, sigma0)
        finals.append(int(trace.total_backlog[-1]))
        slopes.append(trace.tail_slope())
        times.append(trace.total_mwm_seconds())
    knee: float | None = None
    for alpha, slope in zip(alpha_grid, slopes):
        if slope < SLOPE_THRESHOLD_PKT_PER_SLOT:
            knee = alpha
    return SweepResult(
        alphas=tuple(alpha_grid),
        final_backlogs=tuple(finals),
        tail_slopes=tuple(slopes),
        mwm_seconds=tuple(times),
        knee=knee,
    )
