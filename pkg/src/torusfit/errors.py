"""Exception types raised across the package."""


class DomainError(ValueError):
    """A parameter or argument lies outside its admissible domain."""


class ParseError(ValueError):
    """Malformed input file or token."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class SingularityError(DomainError):
    """A quantity is numerically singular (e.g. a vanishing denominator)."""
