"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain where an operation is defined."""


class ConfigError(ValueError):
    """A run configuration could not be parsed or is inconsistent."""
