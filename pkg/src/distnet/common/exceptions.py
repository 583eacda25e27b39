"""Common exception classes for all distnet modules."""

from typing import Any, Optional


class DistNetError(Exception):
    """Base exception for all distnet errors."""
    pass


class InvalidConfigError(DistNetError):
    """Invalid configuration provided."""
    pass


class InvalidGraphError(DistNetError):
    """Graph structure violates its invariants (self-loop, bad vertex id)."""
    pass


class NotStronglyConnectedError(DistNetError):
    """Operation requires a strongly connected graph."""
    pass


class NotBalancedError(DistNetError):
    """Operation requires in-degree equal to out-degree at every vertex."""
    pass


class NotACycleError(DistNetError):
    """Edge list does not form a single directed cycle."""
    pass


class IncompatibleOrientationError(DistNetError):
    """Constraint intervals violate u+ > 0 and u- >= 0."""
    pass


class InvalidBreakpointsError(DistNetError):
    """Split breakpoints are out of order, out of range or of the wrong arity."""
    pass


class NoMatchingError(DistNetError):
    """No controller state x_c satisfies B x_c = E d.

    The failed match is attached as ``result`` so callers can report
    which condition failed.
    """

    def __init__(self, message: str, result: Optional[Any] = None):
        super().__init__(message)
        self.result = result


class ConservationError(DistNetError):
    """Integrated trajectory violates the conserved total storage."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(message)
        self.residual = residual


class IntegrationError(DistNetError):
    """Numerical integration failed (step underflow or non-finite state).

    ``partial`` holds the trajectory recorded up to the failure, if any.
    """

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial


class SpecFileError(DistNetError):
    """Network spec file could not be parsed.

    ``location`` is a human readable pointer such as ``line 4, column 7`` or
    ``edges.2.lo``.
    """

    def __init__(self, message: str, location: Optional[str] = None):
        text = f"{location}: {message}" if location else message
        super().__init__(text)
        self.location = location
