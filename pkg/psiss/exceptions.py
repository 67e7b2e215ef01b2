"""PSISS exception classes."""


class PSISSException(Exception):
    """Base Exception that all other exceptions extend."""


class ExpressionError(PSISSException):
    """Error class for wrapping expression parsing and evaluation errors."""


class ExpressionSyntaxError(ExpressionError):
    """Raised when expression text cannot be parsed."""

    def __init__(self, message, position):
        """Initialize with the 0-based character position of the error."""
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownVariableError(ExpressionError):
    """Raised when an expression references an undeclared variable."""

    def __init__(self, name):
        """Initialize with the offending variable name."""
        super().__init__(f"unknown variable '{name}'")
        self.name = name


class MissingBindingError(ExpressionError):
    """Raised when evaluating an expression with an unbound variable."""

    def __init__(self, name):
        """Initialize with the unbound variable name."""
        super().__init__(f"no binding for variable '{name}'")
        self.name = name


class DomainError(PSISSException):
    """Raised on a mathematical domain violation (ln, sqrt, division, negative s)."""


class InvalidFamilyError(PSISSException):
    """Raised when a switched family violates its structural invariants."""


class DegenerateLyapunovError(PSISSException):
    """Raised when a Lyapunov function vanishes at a nonzero state."""


class InvalidSignalError(PSISSException):
    """Raised when a switching signal violates its invariants."""


class OrderingError(InvalidSignalError):
    """Raised when an interval query is given s >= t."""


class InversionError(PSISSException):
    """Raised when a rate function level cannot be bracketed."""


class GenerationError(PSISSException):
    """Raised when no admissible switching signal can be generated."""


class PreconditionError(PSISSException):
    """Raised when an operation's precondition does not hold."""


class ConfigError(PSISSException):
    """Raised with every validation error found in a configuration document."""

    def __init__(self, errors):
        """Initialize with every collected error message."""
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))
