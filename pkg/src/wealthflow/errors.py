"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid simulation, strategy or metric configuration."""


class DegenerateInputError(ValueError):
    """Input has no usable spread or no money at all."""


class MetricDomainError(ValueError):
    """A metric parameter or value lies outside the formula's domain."""
