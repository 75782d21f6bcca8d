"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class KindMismatchError(TypeError):
    """A motion/shape object of the wrong kind was passed to an evaluator."""


class InvalidBackboneError(ValueError):
    """Backbone violates inextensibility beyond tolerance."""


class InvalidShapeError(ValueError):
    """Wing shape function violates the unit-arc-length constraint."""


class NotYetShedError(DomainError):
    """Retarded time is negative: the wake slice has not been shed yet."""


class SequencingError(RuntimeError):
    """An operation was called before the upstream data it needs exists."""


class AccuracyError(RuntimeError):
    """A numeric kernel failed to reach its accuracy target.

    Carries the achieved residual in ``residual``.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConvergenceError(RuntimeError):
    """An iteration diverged.  ``history`` holds the residual iterates."""

    def __init__(self, message, history=None):
        super().__init__(message)
        self.history = list(history) if history is not None else []


class StepResolutionError(RuntimeError):
    """Characteristic / time-step resolution is insufficient for the target
    accuracy (CFL-style failure)."""


class ImbalanceError(ValueError):
    """Force/energy bookkeeping is inconsistent.  Carries ``residual``."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotReadyError(RuntimeError):
    """Not enough solver history has accumulated for this output."""


class FitError(ValueError):
    """A regression cannot be performed on the given records."""


class ConditioningError(ValueError):
    """Regression input is numerically degenerate."""


class LedgerFault(RuntimeError):
    """Internal circulation ledger violated its conservation invariant."""
