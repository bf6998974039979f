"""Exception hierarchy shared by the library and the CLI exit-code contract."""


class QCTeichError(Exception):
    """Base class for all library errors."""


class InputError(QCTeichError, ValueError):
    """Malformed or out-of-domain input (CLI exit code 3)."""


class RootFindingError(QCTeichError, ArithmeticError):
    """Simultaneous iteration failed to converge; the polynomial is ill-conditioned."""


class CoefficientOverflowError(QCTeichError, ArithmeticError):
    """Polynomial coefficients left the configured magnitude window."""


class DegreeCapError(InputError):
    """Iterate degree d**p exceeds the configured cap; use a smaller max_period."""


class ClassificationIndeterminate(QCTeichError):
    """Dynamics could not be decided numerically; an annotation is required (exit code 2)."""


class ConsistencyError(QCTeichError):
    """An internal invariant was violated (e.g. dimension outside [0, 2d-2])."""

    def __init__(self, message, dump=None):
        super().__init__(message)
        self.dump = dump


class PreconditionError(InputError):
    """A verification routine was called on data violating its hypotheses."""
