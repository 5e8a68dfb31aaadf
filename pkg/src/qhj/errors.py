"""Exception hierarchy.

Two families matter to callers: :class:`DomainError` (the request makes no
sense for the given model or energy) and :class:`SolverError` (a numerical
procedure failed).  The command line maps them to exit codes 2 and 3.
"""


class QHJError(Exception):
    """Base class for every error raised by this package."""


class DomainError(QHJError, ValueError):
    pass


class SolverError(QHJError, RuntimeError):
    pass


class HermiteRangeError(DomainError, OverflowError):
    pass


class QuadratureError(SolverError):
    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ContourError(SolverError):
    pass


class NoClassicalRegionError(DomainError):
    pass


class MultiWellError(DomainError):
    pass


class EndpointError(DomainError):
    pass


class PoleError(DomainError):
    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class LogDivergenceError(PoleError):
    pass


class GridTooCoarseError(DomainError):
    pass


class DomainTooShortError(DomainError):
    pass


class NonEigenvalueError(DomainError):
    pass


class BracketError(DomainError):
    pass


class ResolutionError(DomainError):
    pass


class StiffnessError(SolverError):
    pass


class SeedError(SolverError):
    pass


class IntegrationAccuracyError(SolverError):
    pass
