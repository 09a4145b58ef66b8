"""Exception types shared across the library."""


class McdivError(Exception):
    """Base class for all library errors."""


class InputError(McdivError):
    """Malformed or inconsistent input data (bad documents, bad divisors)."""


class FieldTooSmallError(InputError):
    """A construction needs more rational points than the field provides."""

    def __init__(self, needed, available, where=""):
        self.needed = needed
        self.available = available
        msg = f"need {needed} distinct points, field offers {available}"
        if where:
            msg += f" ({where})"
        super().__init__(msg)


class BudgetError(McdivError):
    """An iteration or search budget was exhausted before completion."""


class AuditError(McdivError):
    """A self-check (audit) failed; carries a witness description."""
