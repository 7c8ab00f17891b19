"""Exception hierarchy shared by the library and the CLI exit-code mapping."""


class GltError(Exception):
    """Base class for all errors raised by this package."""


class InputError(GltError, ValueError):
    """Malformed input: bad endpoints, parse failures, unknown names."""


class ParseError(InputError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DisconnectedGraphError(InputError):
    """The operation requires a connected graph."""


class InfeasibleBudgetError(InputError):
    """Edge budget outside the range a method can honour."""


class NumericalError(GltError, ArithmeticError):
    """An iterative solver failed to converge or broke down."""


class SizeError(InputError):
    """Graph too large for a dense computation."""
