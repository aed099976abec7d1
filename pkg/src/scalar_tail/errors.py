"""Exception types shared across the package."""


class ScalarTailError(Exception):
    """Base class for all errors raised by scalar_tail."""


class DomainError(ScalarTailError, ValueError):
    """An argument lies outside the domain of the operation."""


class HistoryExhausted(ScalarTailError):
    """The requested proper time lies beyond the recorded worldline."""


class OnWorldline(ScalarTailError):
    """The field point coincides with (or is too close to) the worldline."""


class StepRejected(ScalarTailError):
    """The corrector failed to converge and the step size hit its floor."""
