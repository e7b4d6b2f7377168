"""Exception hierarchy. The CLI maps each class to an exit code."""


class WeylcapError(Exception):
    """Base class for all library errors."""


class DimensionError(WeylcapError, ValueError):
    """Operand shapes do not fit together."""


class ValidationError(WeylcapError, ValueError):
    """A value violates the invariants of its type (state, distribution, spec)."""


class ConvergenceError(WeylcapError, ArithmeticError):
    """An iterative kernel hit its iteration cap."""


class NotADeformationError(WeylcapError, ValueError):
    """The probability table does not satisfy the column-major descending chain."""


class FormulaNotApplicableError(WeylcapError, ValueError):
    """No proven closed-form capacity applies to the channel."""


class ResourceGuardError(WeylcapError, ValueError):
    """Requested Hilbert-space dimension exceeds the configured guard."""


class MarginViolationError(WeylcapError, AssertionError):
    """A numerically checked inequality failed by more than its tolerance.

    Carries ``diagnostics`` (inputs and seeds) so the failure can be replayed.
    """

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
