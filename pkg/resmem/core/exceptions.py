"""Error types raised by the reservoir library.

Every error derives from ``ResmemError`` and from the closest builtin, so callers can
catch either ``ResmemError`` or e.g. ``ValueError``.
"""


class ResmemError(Exception):
    """Base class for all library errors."""


class InvalidInputError(ResmemError, ValueError):
    """Input signal contains non-finite values or has the wrong length."""


class DegenerateSignalError(ResmemError, ValueError):
    """Signal has zero variance where a non-constant signal is required."""


class DegenerateTargetError(DegenerateSignalError):
    """Training or testing target is constant."""


class DegenerateStateError(ResmemError, ValueError):
    """Reservoir states are identically zero."""


class DegenerateResponseError(ResmemError, ValueError):
    """A node shows no response at the probe's fundamental frequency."""


class InvalidSparsityError(ResmemError, ValueError):
    """Requested occupied fraction cannot cover every row and column."""


class InvalidMatrixError(ResmemError, ValueError):
    """Matrix cannot be used, e.g. a zero matrix cannot be rescaled."""


class InsufficientDataError(ResmemError, ValueError):
    """Trajectory or drive is too short for the requested statistic."""


class NotAdjacentError(ResmemError, ValueError):
    """Weighted distance requested between unconnected nodes."""


class EmptyGraphError(ResmemError, ValueError):
    """No finite off-diagonal distance exists."""


class IntegrationDivergedError(ResmemError, ArithmeticError):
    """ODE state left the bounded region."""


class NarmaDivergedError(ResmemError, ArithmeticError):
    """NARMA recurrence diverged on every permitted attempt."""


class ReservoirDivergedError(ResmemError, ArithmeticError):
    """Linear reservoir state grew without bound."""


class SingularSystemError(ResmemError, ArithmeticError):
    """Unregularized least-squares system is rank deficient."""


class NumericalError(ResmemError, ArithmeticError):
    """Non-finite values appeared during a computation."""


class CalibrationFailedError(ResmemError, ArithmeticError):
    """No spectral radius in the search bracket reaches the target."""
