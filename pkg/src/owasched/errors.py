"""Exception hierarchy shared by all solver modules."""


class OwaSchedError(Exception):
    """Base class for every error raised by the package."""


class InvalidInstanceError(OwaSchedError, ValueError):
    """An instance violates its invariants."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid instance")


class InfeasibleScheduleError(OwaSchedError, ValueError):
    """A schedule is not a permutation or breaks a precedence pair."""


class ObjectiveMismatchError(OwaSchedError, ValueError):
    """A solver was called on an instance with the wrong objective tag."""


class UnsupportedError(OwaSchedError):
    """The requested case is outside what a solver handles."""


class BudgetExceededError(OwaSchedError):
    """An enumeration would exceed its configured budget."""


class LPError(OwaSchedError):
    """The LP core failed (iteration limit, or an unexpected status)."""


class FormatError(OwaSchedError, ValueError):
    """Malformed input text: bad JSON syntax or wrong schema."""


class SchemaError(FormatError):
    """Well-formed JSON that does not match the expected layout."""
