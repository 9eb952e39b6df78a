"""Exception hierarchy shared by the numerical modules and the CLI."""


class RobinEITError(Exception):
    """Base class for every error raised by this package."""


class DomainError(RobinEITError, ValueError):
    """An argument lies outside the admissible domain of an operation."""


class DegenerateConfigurationError(RobinEITError, ArithmeticError):
    """A mode system is numerically singular for the requested medium."""

    def __init__(self, mode, condition):
        self.mode = mode
        self.condition = condition
        super().__init__(
            f"mode system for n={mode} is numerically singular "
            f"(condition number {condition:.3e})"
        )


class NonGenericTLSError(RobinEITError, ArithmeticError):
    """The truncated TLS problem has no solution (vanishing tail of the last row)."""


class ZeroOperatorError(RobinEITError, ArithmeticError):
    """The operator has an empty spectrum after trimming."""


class EmptyMapError(RobinEITError, ArithmeticError):
    """Every point of an indicator map is flagged; there is nothing to normalize."""


class ConfigError(RobinEITError, ValueError):
    """Invalid experiment configuration."""
