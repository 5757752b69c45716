"""Exception types shared across the package.

Guard violations (search-space and enumeration limits) are separated
from plain input errors so callers can map them to distinct exit codes.
"""


class SectornetError(Exception):
    """Base class for package-specific failures."""


class InvalidGeometryError(SectornetError, ValueError):
    """Node positions or communication range outside the allowed domain."""


class AxisOnEdgeError(SectornetError):
    """A sectoring axis coincides exactly with an incident-edge bearing."""


class SectorizationMismatchError(SectornetError, ValueError):
    """A sectorization does not fit the graph it is applied to."""


class InvalidBipartitionError(SectornetError, ValueError):
    """A claimed two-coloring leaves some edge monochromatic."""


class ZeroFlowError(SectornetError, ValueError):
    """A flow vector is identically zero where a positive flow is required."""


class UnknownLinkError(SectornetError, KeyError):
    """A flow entry references a link that is not in the graph."""


class MalformedInputError(SectornetError, ValueError):
    """A JSON or CSV document does not match the expected shape."""


class NoEdgesError(SectornetError, ValueError):
    """An operation that needs at least one link got an edgeless graph."""


class GuardViolationError(SectornetError):
    """Base class for resource-guard violations (distinct exit code)."""


class SearchSpaceTooLargeError(GuardViolationError):
    """A brute-force enumeration would exceed its configured guard."""


class VertexLimitExceededError(GuardViolationError):
    """An exact odd-set sweep was requested beyond the vertex limit."""
