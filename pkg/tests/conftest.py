"""Shared fixtures and geometry helpers for the test suite."""

from __future__ import annotations

import math

import numpy as np

from sectornet.netgen import ConnectivityGraph, NetworkGeometry, build_connectivity


def star_network(
    center: tuple[float, float],
    bearings_deg: list[float],
    radius: float,
    comm_range: float,
) -> tuple[NetworkGeometry, ConnectivityGraph]:
    """A hub at ``center`` with one leaf per bearing at ``radius``.

    The caller picks ``comm_range`` so that only hub-leaf links form
    (leaf-leaf chords must exceed it).
    """
    cx, cy = center
    positions = [center]
    for b in bearings_deg:
        rad = math.radians(b)
        positions.append((cx + radius * math.cos(rad), cy + radius * math.sin(rad)))
    geometry = NetworkGeometry(
        node_positions=tuple(positions), comm_range_2r=comm_range
    )
    return geometry, build_connectivity(geometry)


def placed_network(
    positions: list[tuple[float, float]], comm_range: float
) -> tuple[NetworkGeometry, ConnectivityGraph]:
    geometry = NetworkGeometry(
        node_positions=tuple(positions), comm_range_2r=comm_range
    )
    return geometry, build_connectivity(geometry)


def triangle_network() -> tuple[NetworkGeometry, ConnectivityGraph]:
    """Complete graph on three well-separated nodes."""
    return placed_network([(0.2, 0.2), (0.8, 0.2), (0.5, 0.7)], 1.0)


def pentagon_network() -> tuple[NetworkGeometry, ConnectivityGraph]:
    """5-cycle: regular pentagon whose sides connect but diagonals do not."""
    center, r = (0.5, 0.5), 0.3
    positions = [
        (center[0] + r * math.cos(2 * math.pi * i / 5),
         center[1] + r * math.sin(2 * math.pi * i / 5))
        for i in range(5)
    ]
    return placed_network(positions, 0.45)


def pairwise_edge_count(pos: np.ndarray, comm_range: float) -> int:
    """Independent brute-force count of node pairs closer than the range."""
    count = 0
    for i in range(pos.shape[0]):
        for j in range(i + 1, pos.shape[0]):
            if math.hypot(pos[i, 0] - pos[j, 0], pos[i, 1] - pos[j, 1]) < comm_range:
                count += 1
    return count
