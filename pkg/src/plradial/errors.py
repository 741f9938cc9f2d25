"""Exception hierarchy shared by the whole package.

Everything raised deliberately by this package derives from
:class:`PLaplaceError`, so callers can catch one type at the boundary.
Errors that are also argument-validation failures additionally derive
from :class:`ValueError`.
"""


class PLaplaceError(Exception):
    """Base class for all errors raised by this package."""


class PrecisionMismatch(PLaplaceError, ValueError):
    """Two series with different working precisions were combined."""


class DomainError(PLaplaceError, ValueError):
    """A real-valued operation was evaluated outside its domain."""


class NonPositiveLeadingCoefficient(DomainError):
    """real_pow needs a strictly positive constant term."""


class NonAnalyticPoint(DomainError):
    """The nonlinearity cannot be expanded at the requested point."""


class NegativeBaseFractionalPower(NonAnalyticPoint):
    """A fractional power of u was requested at a nonpositive expansion point."""


class ParseError(PLaplaceError, ValueError):
    """The nonlinearity source text does not match the grammar.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class DecimalLiteralRejected(ParseError):
    """A decimal literal appeared where an exact rational is required."""


class SignViolation(PLaplaceError):
    """A sign condition required by the series construction fails."""


class DegenerateProblem(PLaplaceError):
    """The derived constants make the leading coefficient equation singular."""


class PrecisionExhausted(PLaplaceError):
    """Cancellation noise persisted through every allowed precision escalation."""


class StepFailure(PLaplaceError):
    """A verification integrator left the region where the equation is defined."""
