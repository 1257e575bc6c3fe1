"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ConsistencyError(RuntimeError):
    """A numerical self-consistency check failed."""


class NoiseConditionError(DomainError):
    """The data violate ``0 < theta * delta < ||g_delta||``."""


class IterationLimitError(RuntimeError):
    """An iterative search ran out of iterations."""


class BracketError(RuntimeError):
    """A root bracket for the discrepancy equation could not be found."""


class ConfigError(ValueError):
    """Invalid configuration file or flag value."""

    def __init__(self, message, key=None, line=None):
        super().__init__(message)
        self.key = key
        self.line = line
