"""Capacity measure checks against exhaustive per-subset oracles."""

import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sectornet.auxgraph import build_auxiliary
from sectornet.capacity import (
    ArrivalMatrix,
    ConservationReport,
    FlowVector,
    Interval,
    Unknown,
    flows_from_json,
    flows_to_json,
    gains,
    in_polytope,
    lambda_extension,
    lb_bound,
    mu_extension,
    validate_flow_conservation,
    zeta_oddsets,
)
from sectornet.errors import (
    MalformedInputError,
    UnknownLinkError,
    VertexLimitExceededError,
    ZeroFlowError,
)
from sectornet.netgen import random_geometric
from sectornet.sectorization import (
    General,
    NetworkSectorization,
    NodeSectorization,
    unsectorized,
)

import conftest


def placed_network(positions, comm_range):
    return conftest.placed_network(positions, comm_range)[1]


def triangle_network():
    return conftest.triangle_network()[1]


def pentagon_network():
    return conftest.pentagon_network()[1]


def oracle_max_load(aux, flows):
    best, witness = 0.0, 0
    for v in range(aux.n_vertices):
        total = 0.0
        for eid in sorted(e for _, e in aux.adjacency[v]):
            total += flows[eid]
        if total > best:
            best, witness = total, v
    return best, witness


def oracle_zeta_full(aux, flows):
    """Min odd-subset ratio over ALL vertices, no domain restriction."""
    best = math.inf
    for size in range(3, aux.n_vertices + 1, 2):
        for subset in itertools.combinations(range(aux.n_vertices), size):
            chosen = set(subset)
            total = 0.0
            for eid, (va, vb) in enumerate(aux.edges):
                if va in chosen and vb in chosen:
                    total += flows[eid]
            if total > 0:
                best = min(best, (size // 2) / total)
    return best


def random_general_sectorization(graph, rng, max_sectors=3):
    per_node = {}
    for node in range(graph.n_nodes):
        d = graph.degree(node)
        if d == 0:
            per_node[node] = NodeSectorization(
                node=node, cuts=(), sector_cap=1
            )
            continue
        j = rng.randint(1, min(d, max_sectors))
        cuts = tuple(sorted(rng.sample(range(d), j)))
        per_node[node] = NodeSectorization(
            node=node, cuts=cuts, sector_cap=max(1, len(cuts))
        )
    return NetworkSectorization(per_node=per_node, kind=General())


def uniform_flow(graph, value):
    return FlowVector.from_undirected((value,) * len(graph.edges))


def random_flow(graph, rng, low=0.05, high=1.0):
    return FlowVector.from_undirected(
        tuple(rng.uniform(low, high) for _ in graph.edges)
    )


def random_connected_instance(rng, max_nodes=7):
    while True:
        n = rng.randint(3, max_nodes)
        _, g = random_geometric(n, 0.9, seed=rng.randint(0, 10**9))
        if g.edges:
            return g


def test_triangle_quarter_flows_tight_case():
    g = triangle_network()
    aux = build_auxiliary(g, unsectorized(g))
    f = uniform_flow(g, 0.25)
    report = lambda_extension(aux, f)
    assert report.mu == 2.0
    assert report.zeta == 1.0 / 0.75
    assert report.lam == report.zeta
    assert report.lam == (2.0 / 3.0) * report.mu
    assert report.exact
    assert report.witness_odd_set == (0, 1, 2)


def test_triangle_third_flows():
    g = triangle_network()
    aux = build_auxiliary(g, unsectorized(g))
    f = uniform_flow(g, 1.0 / 3.0)
    report = lambda_extension(aux, f)
    assert report.mu == pytest.approx(1.5, rel=1e-12)
    assert report.zeta == pytest.approx(1.0, rel=1e-12)
    assert report.lam == pytest.approx(1.0, rel=1e-12)


def test_single_edge_has_no_odd_sets():
    g = placed_network([(0.2, 0.5), (0.6, 0.5)], 0.5)
    aux = build_auxiliary(g, unsectorized(g))
    f = uniform_flow(g, 0.25)
    report = lambda_extension(aux, f)
    assert report.zeta == math.inf
    assert report.lam == report.mu == 4.0
    assert report.witness_odd_set is None


def test_five_cycle_whole_ring_binds():
    g = pentagon_network()
    aux = build_auxiliary(g, unsectorized(g))
    f = uniform_flow(g, 0.25)
    report = lambda_extension(aux, f)
    assert report.mu == 2.0
    assert report.zeta == 2.0 / 1.25
    assert report.lam == 1.6
    assert report.witness_odd_set == tuple(range(5))


def test_mu_witness_prefers_lowest_vertex():
    g = triangle_network()
    aux = build_auxiliary(g, unsectorized(g))
    f = uniform_flow(g, 0.5)
    mu, witness = mu_extension(aux, f)
    assert witness == 0
    assert mu == 1.0


def test_zero_flow_rejected():
    g = triangle_network()
    aux = build_auxiliary(g, unsectorized(g))
    f = uniform_flow(g, 0.0)
    with pytest.raises(ZeroFlowError):
        mu_extension(aux, f)
    with pytest.raises(ZeroFlowError):
        lambda_extension(aux, f)


def test_flow_vector_basics():
    f = FlowVector((0.1, 0.3, 0.0, 0.2))
    assert f.n_edges == 2
    assert f.undirected(0) == pytest.approx(0.4)
    assert f.max_undirected() == pytest.approx(0.4)
    even = FlowVector.from_undirected((0.5,))
    assert even.directed == (0.25, 0.25)
    with pytest.raises(ValueError):
        FlowVector((0.1,))
    with pytest.raises(ValueError):
        FlowVector((-0.1, 0.0))
    with pytest.raises(ValueError):
        FlowVector((math.nan, 0.0))


def ring_network(n_nodes, radius=0.4, comm_scale=1.5):
    positions = [
        (
            0.5 + radius * math.cos(2 * math.pi * i / n_nodes),
            0.5 + radius * math.sin(2 * math.pi * i / n_nodes),
        )
        for i in range(n_nodes)
    ]
    chord = 2 * radius * math.sin(math.pi / n_nodes)
    return placed_network(positions, comm_scale * chord)


def test_guarded_sweep_degrades_to_interval():
    g = ring_network(19)
    assert len(g.edges) == 19
    aux = build_auxiliary(g, unsectorized(g))
    f = uniform_flow(g, 0.3)
    zeta, witness = zeta_oddsets(aux, f)
    assert isinstance(zeta, Unknown)
    assert witness is None
    report = lambda_extension(aux, f)
    assert not report.exact
    assert isinstance(report.lam, Interval)
    assert report.lam.lo == (2.0 / 3.0) * report.mu
    assert report.lam.hi == report.mu
    exact = lambda_extension(aux, f, vertex_limit=19)
    assert exact.exact
    assert report.lam.lo <= exact.lam <= report.lam.hi


def test_matches_exhaustive_oracles_on_random_instances():
    rng = random.Random(3021)
    for _ in range(120):
        g = random_connected_instance(rng)
        sigma = (
            unsectorized(g)
            if rng.random() < 0.3
            else random_general_sectorization(g, rng)
        )
        aux = build_auxiliary(g, sigma)
        f = random_flow(g, rng)
        flows = f.undirected_all()

        load, load_witness = oracle_max_load(aux, flows)
        mu, witness = mu_extension(aux, f)
        assert mu == 1.0 / load
        assert witness == load_witness

        report = lambda_extension(aux, f, vertex_limit=aux.n_vertices)
        assert report.exact
        zeta_full = oracle_zeta_full(aux, flows)
        assert report.lam == min(mu, zeta_full)
        if not isinstance(report.zeta, Unknown) and report.zeta <= mu:
            assert report.zeta == zeta_full
        if report.witness_odd_set is not None:
            chosen = set(report.witness_odd_set)
            assert len(chosen) % 2 == 1
            total = 0.0
            for eid, (va, vb) in enumerate(aux.edges):
                if va in chosen and vb in chosen:
                    total += flows[eid]
            assert report.zeta == (len(chosen) // 2) / total


def test_bipartite_short_circuit():
    rng = random.Random(77)
    from sectornet.sectorization import even_homogeneous

    for _ in range(25):
        g = random_connected_instance(rng, max_nodes=8)
        aux = build_auxiliary(g, even_homogeneous(g, 2))
        f = random_flow(g, rng)
        report = lambda_extension(aux, f)
        assert report.exact
        assert report.lam == report.mu
        if not isinstance(report.zeta, Unknown) and report.zeta != math.inf:
            assert report.zeta >= report.mu * (1 - 1e-9)


def test_scaling_homogeneity():
    rng = random.Random(15)
    g = random_connected_instance(rng)
    aux = build_auxiliary(g, unsectorized(g))
    f = random_flow(g, rng)
    base = lambda_extension(aux, f)
    for c in (0.25, 4.0, 3.7):
        scaled = lambda_extension(aux, f.scaled(c))
        assert scaled.mu == pytest.approx(base.mu / c, rel=1e-12)
        assert scaled.lam == pytest.approx(base.lam / c, rel=1e-12)
    sigma = random_general_sectorization(g, rng)
    g_lam, g_mu = gains(g, sigma, f)
    g_lam2, g_mu2 = gains(g, sigma, f.scaled(2.5))
    assert g_mu2 == pytest.approx(g_mu, rel=1e-12)
    assert g_lam2 == pytest.approx(g_lam, rel=1e-12)


def test_sectorizing_never_shrinks_capacity():
    rng = random.Random(4004)
    for _ in range(60):
        g = random_connected_instance(rng)
        sigma = random_general_sectorization(g, rng)
        f = random_flow(g, rng)
        plain = lambda_extension(
            build_auxiliary(g, unsectorized(g)), f, vertex_limit=30
        )
        cut = lambda_extension(
            build_auxiliary(g, sigma), f, vertex_limit=30
        )
        assert cut.mu >= plain.mu
        if cut.exact and plain.exact:
            assert cut.lam >= plain.lam


def test_gains_triangle_full_separation():
    g = triangle_network()
    per_node = {
        node: NodeSectorization(node=node, cuts=(0, 1), sector_cap=2)
        for node in range(3)
    }
    sigma = NetworkSectorization(per_node=per_node, kind=General())
    f = uniform_flow(g, 0.25)
    g_lam, g_mu = gains(g, sigma, f)
    assert g_mu == 2.0
    assert g_lam == pytest.approx(3.0, rel=1e-12)
    assert (2.0 / 3.0) * g_mu <= g_lam * (1 + 1e-9)
    assert g_lam <= (3.0 / 2.0) * g_mu * (1 + 1e-9)


def test_unsectorized_gains_are_unity():
    g = pentagon_network()
    f = uniform_flow(g, 0.2)
    g_lam, g_mu = gains(g, unsectorized(g), f)
    assert g_lam == 1.0
    assert g_mu == 1.0


def test_extension_bound_chain_on_random_suite():
    rng = random.Random(608)
    for _ in range(150):
        g = random_connected_instance(rng)
        sigma = (
            unsectorized(g)
            if rng.random() < 0.4
            else random_general_sectorization(g, rng)
        )
        aux = build_auxiliary(g, sigma)
        f = random_flow(g, rng)
        report = lambda_extension(aux, f, vertex_limit=30)
        assert report.exact
        lam = report.lam
        slack = 1 + 1e-9
        assert (2.0 / 3.0) * report.mu <= lam * slack
        assert lam <= report.mu * slack
        assert 1.0 / report.mu >= 1.0 / lam - f.max_undirected() - 1e-9
        g_lam, g_mu = gains(g, sigma, f, vertex_limit=30)
        assert isinstance(g_lam, float)
        assert (2.0 / 3.0) * g_mu <= g_lam * slack
        assert g_lam <= (3.0 / 2.0) * g_mu * slack


def test_lb_bound_values():
    f = FlowVector((0.0, 0.0, 0.1, 0.1))
    assert lb_bound(1.0, FlowVector((0.0, 0.0, 0.0, 0.0))) == 1.0
    f3 = FlowVector.from_undirected((1.0 / 3.0, 0.1))
    assert lb_bound(3.0, f3) == pytest.approx(0.5, rel=1e-12)
    assert lb_bound(2.0, f) < 1.0
    with pytest.raises(ValueError):
        lb_bound(0.0, f)


def test_polytope_matching_corners():
    rng = random.Random(9)
    for _ in range(30):
        g = random_connected_instance(rng)
        aux = build_auxiliary(g, unsectorized(g))
        taken = []
        touched = set()
        order = list(range(len(aux.edges)))
        rng.shuffle(order)
        for eid in order:
            va, vb = aux.edges[eid]
            if va not in touched and vb not in touched:
                taken.append(eid)
                touched.update((va, vb))
        x = [1.0 if e in taken else 0.0 for e in range(len(aux.edges))]
        assert in_polytope(x, aux, "integral", vertex_limit=30)
        assert in_polytope(x, aux, "fractional")


def test_polytope_triangle_half_vector():
    g = triangle_network()
    aux = build_auxiliary(g, unsectorized(g))
    x = [0.5, 0.5, 0.5]
    assert in_polytope(x, aux, "fractional")
    assert not in_polytope(x, aux, "integral")


def test_polytope_boundary_probe():
    rng = random.Random(2718)
    for _ in range(40):
        g = random_connected_instance(rng)
        aux = build_auxiliary(g, unsectorized(g))
        f = random_flow(g, rng)
        report = lambda_extension(aux, f, vertex_limit=30)
        assert report.exact
        lam = report.lam
        scaled = [lam * fe for fe in f.undirected_all()]
        assert in_polytope(scaled, aux, "integral", vertex_limit=30)
        bumped = [1.000001 * x for x in scaled]
        assert not in_polytope(bumped, aux, "integral", vertex_limit=30)


def test_polytope_guard_and_validation():
    g = ring_network(19)
    aux = build_auxiliary(g, unsectorized(g))
    x = [0.2] * len(aux.edges)
    with pytest.raises(VertexLimitExceededError):
        in_polytope(x, aux, "integral")
    assert in_polytope(x, aux, "fractional")
    with pytest.raises(ValueError):
        in_polytope(x, aux, "both")
    with pytest.raises(ValueError):
        in_polytope(x[:-1], aux, "fractional")


def line_network():
    return placed_network([(0.1, 0.5), (0.5, 0.5), (0.9, 0.5)], 0.45)


def test_conservation_valid_cases():
    g = line_network()
    zero = ArrivalMatrix.uniform(3, 0.0)
    assert validate_flow_conservation(g, zero, {}) == ConservationReport(
        valid=True, violation=None, residual=0.0
    )
    alpha = ArrivalMatrix(
        ((0.0, 0.0, 0.5), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    )
    flows = {(0, 1, 2): 0.5, (1, 2, 2): 0.5}
    report = validate_flow_conservation(g, alpha, flows)
    assert report.valid


def test_conservation_detects_imbalance():
    g = line_network()
    alpha = ArrivalMatrix(
        ((0.0, 0.0, 0.5), (0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    )
    flows = {(0, 1, 2): 0.5, (1, 2, 2): 0.4}
    report = validate_flow_conservation(g, alpha, flows)
    assert not report.valid
    assert "node 1" in report.violation
    assert report.residual == pytest.approx(-0.1)


def test_conservation_other_violations():
    g = line_network()
    zero = ArrivalMatrix.uniform(3, 0.0)
    bad_link = validate_flow_conservation(g, zero, {(0, 2, 1): 0.1})
    assert not bad_link.valid and "unknown link" in bad_link.violation
    overload = validate_flow_conservation(
        g,
        ArrivalMatrix(((0.0, 0.6, 0.6), (0.0,) * 3, (0.0,) * 3)),
        {(0, 1, 1): 0.6, (0, 1, 2): 0.6, (1, 2, 2): 0.6},
    )
    assert not overload.valid
    assert "carries" in overload.violation
    assert overload.residual == pytest.approx(0.2)
    negative = validate_flow_conservation(g, zero, {(0, 1, 2): -0.1})
    assert not negative.valid


def test_flow_json_round_trips():
    g = line_network()
    f = FlowVector((0.1, 0.0, 0.25, 0.3))
    doc = flows_to_json(g, f)
    assert flows_from_json(g, doc) == f
    undirected_doc = '{"undirected": {"0-1": 0.4, "1-2": 0.6}}'
    f2 = flows_from_json(g, undirected_doc)
    assert f2.directed == (0.2, 0.2, 0.3, 0.3)
    with pytest.raises(UnknownLinkError):
        flows_from_json(g, '{"directed": {"0->2": 0.1}}')
    with pytest.raises(MalformedInputError):
        flows_from_json(g, '{"directed": {"0-1": 0.1}}')
    with pytest.raises(MalformedInputError):
        flows_from_json(g, '{"nope": {}}')
    with pytest.raises(MalformedInputError):
        flows_from_json(g, "not json")
    with pytest.raises(MalformedInputError):
        flows_from_json(g, '{"undirected": {"0-1": -2}}')


def test_arrival_matrix_validation():
    with pytest.raises(ValueError):
        ArrivalMatrix(((0.0, 0.1), (0.2, 0.3)))
    with pytest.raises(ValueError):
        ArrivalMatrix(((0.0, -0.1), (0.2, 0.0)))
    with pytest.raises(ValueError):
        ArrivalMatrix(((0.0, 0.1),))
    ok = ArrivalMatrix.uniform(3, 0.2)
    assert ok.rates[0][0] == 0.0
    assert ok.rates[0][1] == 0.2


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10**6), st.integers(3, 7))
def test_report_invariants_hold(seed, n_nodes):
    rng = random.Random(seed)
    _, g = random_geometric(n_nodes, 0.9, seed=seed)
    if not g.edges:
        return
    sigma = (
        unsectorized(g)
        if rng.random() < 0.5
        else random_general_sectorization(g, rng)
    )
    aux = build_auxiliary(g, sigma)
    f = random_flow(g, rng)
    report = lambda_extension(aux, f, vertex_limit=30)
    assert report.exact
    slack = 1 + 1e-9
    assert (2.0 / 3.0) * report.mu <= report.lam * slack
    assert report.lam <= report.mu * slack
    scaled = [report.lam * fe for fe in f.undirected_all()]
    assert in_polytope(scaled, aux, "integral", vertex_limit=30)
