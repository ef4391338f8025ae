"""Exception and warning types shared by the solvers and the command line."""


class SppsError(Exception):
    """Base class for all errors raised by this package."""


class InputError(SppsError, ValueError):
    """Rejected input: bad grid, bad parameters, malformed configuration."""


class DomainError(InputError):
    """Operands live on incompatible grids or domains."""


class OutOfRangeError(InputError):
    """Argument outside the declared validity range of a routine."""


class SingularSolutionError(SppsError):
    """A particular solution that must be non-vanishing came close to zero."""


class ConvergenceError(SppsError):
    """An iteration did not reach its tolerance within the iteration cap.

    ``partial`` carries whatever the iteration had produced when it gave up
    (for root finding: the roots that did converge).
    """

    def __init__(self, message, partial=None, iterations=None):
        super().__init__(message)
        self.partial = partial
        self.iterations = iterations


class TruncationWarning(UserWarning):
    """A truncated series is being used outside the range where its tail is small."""
