"""Exception types shared across the package."""


class CantorlenError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CantorlenError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class SaturationError(CantorlenError, OverflowError):
    """A value fell outside the two-layer exponential range.

    Values up to exp(+-exp(1e300)) are representable; anything beyond
    (triple exponentials and worse) raises this instead of silently
    collapsing.
    """


class UnsupportedOperationError(CantorlenError):
    """The operation is not defined for these operand signs and layers."""


class SpecViolationError(CantorlenError):
    """A supplied or generated sequence value violates its contract.

    Carries the offending index when one is known.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


class ModeUnavailableError(CantorlenError):
    """Exact-rational mode was requested but cannot be provided."""


class NoPentagonError(CantorlenError, ValueError):
    """No right-angled pentagon exists with the given side data."""


class PreconditionError(CantorlenError):
    """A structural precondition on the gap sequence is not met."""


class UnsupportedKindError(CantorlenError):
    """The requested analysis does not apply to this sequence kind."""


class ConfigError(CantorlenError):
    """A sequence config file is malformed."""
