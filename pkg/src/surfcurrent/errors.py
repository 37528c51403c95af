"""Exception types raised across the package."""


class DomainError(ValueError):
    """Argument outside the validated domain of an evaluator."""


class ConvergenceError(RuntimeError):
    """An adaptive procedure did not meet its tolerance within budget."""


class ConfigError(ValueError):
    """Invalid experiment or expansion configuration."""


class FitError(RuntimeError):
    """A scaling fit could not be performed (too few points, underflow)."""
