"""Exception types shared across the package."""


class DataError(ValueError):
    """Input data violates a file format or a domain invariant."""


class ConfigError(ValueError):
    """An experiment configuration is invalid."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
