"""Exception types shared across the package."""


class NschError(Exception):
    """Base class for all package-specific errors."""


class DataError(NschError, ValueError):
    """Input data is malformed (non-finite values, wrong shape)."""


class PreconditionError(NschError, ValueError):
    """A documented operation precondition was violated."""


class DomainError(NschError, ValueError):
    """Scalar argument outside the admissible interval [-1, 1]."""


class SingularityError(NschError, ValueError):
    """Evaluation requested at or beyond the singular points +-1."""


class SingularForcingError(NschError, ArithmeticError):
    """The comparison-ODE solve found no root inside (-1, 1)."""


class SnapshotFormatError(NschError, ValueError):
    """Binary snapshot is truncated, mislabelled, or of an unsupported version."""


class ConfigError(NschError, ValueError):
    """Configuration text failed validation.

    ``problems`` holds one ``(line, message)`` tuple per violation; line 0
    marks problems not tied to a specific line (missing keys).
    """

    def __init__(self, problems):
        self.problems = sorted(problems)
        lines = [f"line {ln}: {msg}" if ln else msg for ln, msg in self.problems]
        super().__init__("invalid configuration:\n  " + "\n  ".join(lines))


class StabilityWarning(UserWarning):
    """Numerical-stability advisory (run continues)."""
