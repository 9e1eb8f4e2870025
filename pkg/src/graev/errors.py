class GraevError(Exception):
    """Base class for all errors raised by this package."""


class StructuralError(GraevError, ValueError):
    """Malformed input: non-square table, negative entry, bad file layout."""


class InvalidSpaceError(GraevError, ValueError):
    """The distance table violates a pseudometric axiom."""


class CapacityError(GraevError):
    """Support too large for the exact matching solver."""


class GuardError(GraevError):
    """An exhaustive search would exceed its combinatorial guard."""


class BallConditionError(GraevError, ValueError):
    """The element is not in the ball required by the witness construction."""


class NotCauchyError(GraevError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness
