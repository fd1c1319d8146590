"""Exception types shared across the package."""


class ParseError(ValueError):
    """Raised when a polynomial expression cannot be parsed.

    ``position`` is the 0-based character offset of the offending token.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class ProjectionError(ValueError):
    """Raised when a matrix is not an orthogonal projection within tolerance."""


class ConsistencyError(RuntimeError):
    """Raised when a computed quantity violates an identity it must satisfy.

    This signals a bug or a loss of numerical accuracy, not bad input.
    """


class UnsupportedCaseError(DomainError):
    """Raised when no closed form exists for the requested case.

    Callers are expected to fall back to a numerical computation.
    """
