"""Exception types raised by qmeas."""


class QmeasError(Exception):
    """Base class for all qmeas errors."""


class ValidationError(QmeasError, ValueError):
    """An operator or collection fails a structural check (Hermiticity, PSD, completeness...)."""


class DimensionError(ValidationError):
    """Operands have incompatible shapes."""


class InfeasibleError(QmeasError):
    """A POVM is not a non-ideal version of the requested observable.

    Attributes
    ----------
    residual : float
        Max-entry residual of the best decomposition found.
    which : str or None
        Which marginal failed, when raised from a joint report.
    """

    def __init__(self, message, residual=float("nan"), which=None):
        super().__init__(message)
        self.residual = residual
        self.which = which
