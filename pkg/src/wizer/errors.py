class WizerError(Exception):
    """Base class for errors raised by this package."""


class InputError(WizerError, ValueError):
    """Invalid user input: bad shapes, values, files or parameters."""


class DomainError(InputError):
    """A numerical precondition on the parameters is violated."""


class NumericError(WizerError, ArithmeticError):
    """A numerical procedure could not produce a trustworthy result."""
