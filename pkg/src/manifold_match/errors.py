"""Exception types shared across the toolkit."""


class ManifoldMatchError(Exception):
    """Base class for all toolkit errors."""


class FormatError(ManifoldMatchError):
    """A file could not be parsed under the declared format."""


class ValidationError(ManifoldMatchError):
    """An argument violates an operation's preconditions."""


class IntegrityError(ValidationError):
    """Cross-referenced structures disagree (counts, labels, object ids)."""


class ConfigError(ValidationError):
    """An experiment configuration is inconsistent or unsatisfiable."""


class ConditioningError(ManifoldMatchError):
    """A numerical routine failed on ill-conditioned input."""
