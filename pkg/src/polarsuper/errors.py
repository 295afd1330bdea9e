class DomainError(ValueError):
    """Evaluation requested at or too close to a singular location."""


class ConfigurationError(ValueError):
    """Inputs are missing data the requested computation needs."""


class ClassicalModeError(ConfigurationError):
    """A quantum-only operation was requested for a classical (hbar = 0) model."""
