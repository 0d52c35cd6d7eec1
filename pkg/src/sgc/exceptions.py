"""Exception types shared across the package."""


class GraphFormatError(ValueError):
    """Malformed edge-list or vote-matrix input."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DisconnectedGraphError(ValueError):
    """Operation requires a connected underlying graph."""


class NumericalError(ArithmeticError):
    """Eigensolver failure, overflow or similar numerical breakdown."""
