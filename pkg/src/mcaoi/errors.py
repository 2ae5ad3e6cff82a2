"""Exception hierarchy. ``category`` feeds the CLI exit status."""


class AoIError(Exception):
    category = "runtime"


class InvalidConfigError(AoIError, ValueError):
    category = "validation"


class OutOfDomainError(AoIError, ValueError):
    category = "validation"


class EmptyInputError(AoIError, ValueError):
    category = "validation"


class InsufficientDataError(AoIError, ValueError):
    category = "validation"


class NonConvergenceError(AoIError, RuntimeError):
    pass


class NegativeRadicandError(AoIError, ArithmeticError):
    """A square-root argument came out negative; ``value`` carries it."""

    def __init__(self, message, value):
        super().__init__(message)
        self.value = value


class ScenarioError(AoIError, ValueError):
    """Scenario file could not be parsed or failed validation.

    ``issues`` lists ``(field_path, message)`` pairs, one per violation.
    """

    category = "validation"

    def __init__(self, message, issues=()):
        self.issues = list(issues)
        if self.issues:
            message = message + "\n" + "\n".join(f"  {path}: {msg}" for path, msg in self.issues)
        super().__init__(message)
