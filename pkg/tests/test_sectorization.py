"""Cut placement, axis equivalence, and enumeration tests."""

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import star_network
from sectornet.errors import (
    AxisOnEdgeError,
    SearchSpaceTooLargeError,
    SectorizationMismatchError,
)
from sectornet.netgen import grid_network, random_geometric
from sectornet.sectorization import (
    EvenHomogeneous,
    NodeSectorization,
    Unsectorized,
    axes_to_cuts,
    enumerate_node_sectorizations,
    even_homogeneous,
    sector_arcs,
    sectorization_from_json,
    sectorization_to_json,
    unsectorized,
    validate_sectorization,
)


def test_axes_to_cuts_three_bearings():
    ns = axes_to_cuts(0, (10.0, 80.0, 200.0), [0.0, 180.0])
    # Axis 0 lies in the wrap gap (200 -> 10), axis 180 between 80 and
    # 200, so the sectors are {10, 80} and {200}.
    assert ns.cuts == (1, 2)
    arcs = sector_arcs(ns.cuts, 3)
    assert sorted(arcs) == [(0, 1), (2,)]


def test_axes_in_same_gap_collapse():
    ns = axes_to_cuts(0, (10.0, 80.0), [45.0, 50.0])
    assert ns.cuts == (0,)
    assert sector_arcs(ns.cuts, 2) == [(1, 0)]


def test_axis_exactly_on_edge_rejected():
    with pytest.raises(AxisOnEdgeError):
        axes_to_cuts(0, (10.0, 80.0), [10.0])


def test_duplicate_axes_rejected():
    with pytest.raises(ValueError):
        axes_to_cuts(0, (10.0, 80.0), [30.0, 390.0])


def test_single_edge_any_axis_cuts_gap_zero():
    ns = axes_to_cuts(4, (90.0,), [0.0])
    assert ns.cuts == (0,)
    assert sector_arcs(ns.cuts, 1) == [(0,)]


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_axis_jitter_within_gaps_is_equivalent(data):
    # Any two axis sets with the same gap membership denote the same
    # layout, so nudging each axis without crossing an edge bearing
    # must leave the cuts unchanged.
    d = data.draw(st.integers(2, 8))
    bearings = data.draw(
        st.lists(
            st.floats(0.0, 359.99, allow_nan=False),
            min_size=d,
            max_size=d,
            unique=True,
        ).map(lambda xs: tuple(sorted(xs)))
    )
    n_axes = data.draw(st.integers(1, 4))
    bearing_set = set(bearings)
    axes = []
    for _ in range(n_axes):
        gap = data.draw(st.integers(0, d - 1))
        lo = bearings[gap]
        hi = bearings[gap + 1] if gap + 1 < d else bearings[0] + 360.0
        frac = data.draw(st.floats(0.01, 0.99))
        axis = lo + frac * (hi - lo)
        # gaps a few ulps wide can round the draw onto a boundary,
        # which is outside the premise (axes strictly inside gaps)
        assume(lo < axis < hi and axis % 360.0 not in bearing_set)
        axes.append(axis)
    if len(set(a % 360.0 for a in axes)) != len(axes):
        return  # two draws collided; not the property under test
    base = axes_to_cuts(0, bearings, [a % 360.0 for a in axes])
    jittered = []
    for a in axes:
        gap_index = None
        frac = data.draw(st.floats(0.01, 0.99))
        for g in range(d):
            lo = bearings[g]
            hi = bearings[g + 1] if g + 1 < d else bearings[0] + 360.0
            if lo < a < hi:
                moved_axis = lo + frac * (hi - lo)
                assume(lo < moved_axis < hi and moved_axis % 360.0 not in bearing_set)
                jittered.append(moved_axis)
                gap_index = g
                break
        assert gap_index is not None
    try:
        moved = axes_to_cuts(0, bearings, [a % 360.0 for a in jittered])
    except ValueError:
        return  # two jittered axes collided; draw again elsewhere
    assert moved.cuts == base.cuts


def test_even_homogeneous_two_sectors_random_graph():
    _, graph = random_geometric(25, 0.3, seed=9)
    s = even_homogeneous(graph, 2, axis_offset_degrees=0.0)
    assert isinstance(s.kind, EvenHomogeneous)
    assert s.kind.n_sectors == 2
    validate_sectorization(s, graph)
    for n in range(graph.n_nodes):
        if graph.degree(n) >= 1:
            assert 1 <= len(s.per_node[n].cuts) <= 2


def test_even_homogeneous_rejects_odd_k():
    _, graph = random_geometric(10, 0.3, seed=1)
    with pytest.raises(ValueError):
        even_homogeneous(graph, 3)


def test_even_homogeneous_perturbs_on_grid_axis_collision():
    # Grid bearings hit 0 and 180 exactly, so the offset-0 horizontal
    # axes must step to the first perturbed offset.
    _, graph = grid_network(4, 4, with_diagonals=True)
    s = even_homogeneous(graph, 2, axis_offset_degrees=0.0)
    assert s.kind.axis_offset_degrees == pytest.approx(1e-3)
    validate_sectorization(s, graph)


def test_even_homogeneous_refinement_doubling():
    # Doubling the sector count keeps every existing axis, so the cut
    # set at each node can only grow.
    _, graph = random_geometric(20, 0.35, seed=21)
    s2 = even_homogeneous(graph, 2, axis_offset_degrees=7.0)
    s4 = even_homogeneous(graph, 4, axis_offset_degrees=7.0)
    if (
        s2.kind.axis_offset_degrees == s4.kind.axis_offset_degrees
    ):  # no perturbation interfered
        for n in range(graph.n_nodes):
            assert set(s2.per_node[n].cuts) <= set(s4.per_node[n].cuts)


def test_unsectorized_layout():
    _, graph = random_geometric(15, 0.25, seed=4)
    s = unsectorized(graph)
    assert isinstance(s.kind, Unsectorized)
    validate_sectorization(s, graph)
    for n in range(graph.n_nodes):
        expected = (0,) if graph.degree(n) >= 1 else ()
        assert s.per_node[n].cuts == expected


def test_enumeration_counts():
    # Oracle: binomial sums computed independently.
    assert len(list(enumerate_node_sectorizations(4, 2))) == math.comb(
        4, 1
    ) + math.comb(4, 2)
    assert len(list(enumerate_node_sectorizations(3, 3))) == 7
    assert list(enumerate_node_sectorizations(0, 3)) == []
    sets = list(enumerate_node_sectorizations(5, 3))
    assert len(sets) == len(set(sets))
    assert all(1 <= len(cs) <= 3 for cs in sets)


def test_enumeration_guard():
    with pytest.raises(SearchSpaceTooLargeError):
        list(enumerate_node_sectorizations(13, 2))
    with pytest.raises(SearchSpaceTooLargeError):
        list(enumerate_node_sectorizations(5, 7))


def test_sector_arcs_partition_cycle():
    arcs = sector_arcs((0, 2, 4), 6)
    assert sorted(p for arc in arcs for p in arc) == list(range(6))
    assert arcs == [(1, 2), (3, 4), (5, 0)]


def test_node_sectorization_validation():
    with pytest.raises(SectorizationMismatchError):
        NodeSectorization(node=0, cuts=(2, 1), sector_cap=2)
    with pytest.raises(SectorizationMismatchError):
        NodeSectorization(node=0, cuts=(1, 1), sector_cap=2)
    with pytest.raises(SectorizationMismatchError):
        NodeSectorization(node=0, cuts=(0,), sector_cap=0)


def test_validate_rejects_mismatches():
    _, graph = star_network((0.5, 0.5), [0.0, 90.0, 200.0], 0.1, 0.12)
    s = unsectorized(graph)
    bad = dict(s.per_node)
    bad[0] = NodeSectorization(node=0, cuts=(0, 5), sector_cap=3)
    from sectornet.sectorization import NetworkSectorization, General

    with pytest.raises(SectorizationMismatchError):
        validate_sectorization(
            NetworkSectorization(per_node=bad, kind=General()), graph
        )


def test_json_round_trip_even_homogeneous():
    _, graph = random_geometric(12, 0.4, seed=13)
    s = even_homogeneous(graph, 4, axis_offset_degrees=3.0)
    doc = sectorization_to_json(s)
    back = sectorization_from_json(doc)
    assert back.kind == s.kind
    assert {n: ns.cuts for n, ns in back.per_node.items()} == {
        n: ns.cuts for n, ns in s.per_node.items()
    }
    validate_sectorization(back, graph)


def test_json_round_trip_unsectorized():
    _, graph = random_geometric(8, 0.4, seed=2)
    s = unsectorized(graph)
    back = sectorization_from_json(sectorization_to_json(s))
    assert isinstance(back.kind, Unsectorized)
    assert back.per_node == s.per_node
