"""Sectorized wireless mesh toolkit.

Generates mesh geometries, synthesizes per-node sector layouts,
analyzes throughput capacity through matchings of the sectorized
auxiliary graph, and simulates queue-based scheduling on top.
"""

from .auxgraph import (
    AuxiliaryGraph,
    BipartiteDecomposition,
    bipartite_decomposition,
    build_auxiliary,
    schedule_is_matching,
)
from .backpressure import (
    DynamicEvery,
    Fixed,
    QueueState,
    RunTrace,
    SimConfig,
    SlotSchedule,
    SweepResult,
    backpressure_weights,
    run,
    schedule_slot,
    stability_sweep,
    step,
)
from .capacity import (
    ArrivalMatrix,
    ConservationReport,
    ExtensionReport,
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
from .errors import (
    AxisOnEdgeError,
    GuardViolationError,
    InvalidBipartitionError,
    InvalidGeometryError,
    MalformedInputError,
    NoEdgesError,
    SearchSpaceTooLargeError,
    SectornetError,
    SectorizationMismatchError,
    UnknownLinkError,
    VertexLimitExceededError,
    ZeroFlowError,
)
from .matching import (
    Matching,
    WeightedGraph,
    enumerate_matchings,
    mwm_bipartite,
    mwm_general,
    warm_up,
)
from .netgen import (
    ConnectivityGraph,
    NetworkGeometry,
    build_connectivity,
    grid_network,
    load_network,
    random_geometric,
    save_network,
    theta_threshold,
)
from .optimizer import (
    NetworkSectorizeResult,
    NodeFlowProfile,
    SectorizeResult,
    brute_force_opt,
    exist_sectorization_n,
    sectorize_n,
    sectorize_network,
)
from .sectorization import (
    EvenHomogeneous,
    General,
    NetworkSectorization,
    NodeSectorization,
    Unsectorized,
    axes_to_cuts,
    even_homogeneous,
    sectorization_from_json,
    sectorization_to_json,
    unsectorized,
)

__version__ = "0.1.0"

__all__ = [
    "ArrivalMatrix",
    "AuxiliaryGraph",
    "AxisOnEdgeError",
    "BipartiteDecomposition",
    "ConnectivityGraph",
    "ConservationReport",
    "DynamicEvery",
    "EvenHomogeneous",
    "ExtensionReport",
    "Fixed",
    "FlowVector",
    "General",
    "GuardViolationError",
    "Interval",
    "InvalidBipartitionError",
    "InvalidGeometryError",
    "MalformedInputError",
    "Matching",
    "NetworkGeometry",
    "NetworkSectorization",
    "NetworkSectorizeResult",
    "NoEdgesError",
    "NodeFlowProfile",
    "NodeSectorization",
    "QueueState",
    "RunTrace",
    "SearchSpaceTooLargeError",
    "SectorizationMismatchError",
    "SectorizeResult",
    "SectornetError",
    "SimConfig",
    "SlotSchedule",
    "SweepResult",
    "Unknown",
    "UnknownLinkError",
    "Unsectorized",
    "VertexLimitExceededError",
    "WeightedGraph",
    "ZeroFlowError",
    "axes_to_cuts",
    "backpressure_weights",
    "bipartite_decomposition",
    "build_auxiliary",
    "build_connectivity",
    "brute_force_opt",
    "enumerate_matchings",
    "even_homogeneous",
    "exist_sectorization_n",
    "flows_from_json",
    "flows_to_json",
    "gains",
    "grid_network",
    "in_polytope",
    "lambda_extension",
    "lb_bound",
    "load_network",
    "mu_extension",
    "mwm_bipartite",
    "mwm_general",
    "random_geometric",
    "run",
    "save_network",
    "schedule_is_matching",
    "schedule_slot",
    "sectorization_from_json",
    "sectorization_to_json",
    "sectorize_n",
    "sectorize_network",
    "stability_sweep",
    "step",
    "theta_threshold",
    "unsectorized",
    "validate_flow_conservation",
    "warm_up",
    "zeta_oddsets",
]
