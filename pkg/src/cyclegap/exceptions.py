class CycleGapError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(CycleGapError, ValueError):
    """Operands do not have the expected shape."""


class SetDefinitionError(CycleGapError, ValueError):
    """A convex set description is invalid (e.g. empty)."""


class SolverError(CycleGapError, RuntimeError):
    """A linear system could not be solved reliably."""


class ConsistencyError(CycleGapError, RuntimeError):
    """Two characterizations that must agree gave different answers."""


class ScenarioError(CycleGapError, ValueError):
    """A scenario file is malformed."""
