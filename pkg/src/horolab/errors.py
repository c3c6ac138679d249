"""Exception types shared across the package."""


class InputError(ValueError):
    """Invalid argument values: unknown vertices, malformed words, bad ranges."""


class ResourceLimitError(RuntimeError):
    """A configured size or expansion budget would be exceeded."""


class ConfigError(ValueError):
    """An experiment config fails schema validation.  Carries the field path."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class PropertyViolation(RuntimeError):
    """An experiment's structural gate failed (distinct exit code in the CLI)."""
