"""Exception types raised across the package."""


class OrbitError(Exception):
    """Base class for all package errors."""


class DimensionError(OrbitError, ValueError):
    pass


class TraceFreeError(OrbitError, ValueError):
    """Input matrix fails the trace-free check; carries the offending trace."""

    def __init__(self, trace, message=None):
        self.trace = trace
        super().__init__(message or f"matrix is not trace-free: trace = {trace}")


class NonFiniteError(OrbitError, ValueError):
    pass


class EigenSolverError(OrbitError, ArithmeticError):
    pass


class PartitionError(OrbitError, ValueError):
    pass


class InZError(OrbitError, ValueError):
    """The matrix lies in Z, where the denominator of K vanishes."""


class ScalarMatrixError(OrbitError, ValueError):
    pass


class AmbiguousClusteringError(OrbitError, ArithmeticError):
    """Eigenvalue grouping cannot be decided at the current tolerance."""


class NotNilpotentError(OrbitError, ValueError):
    pass
