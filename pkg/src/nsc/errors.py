"""Exception types shared across the package."""


class NSCError(Exception):
    """Base class for all errors raised by nsc."""


class InputError(NSCError, ValueError):
    """Bad argument value: empty pattern, misaligned length, too-short string."""


class ConfigError(NSCError, ValueError):
    """Invalid configuration (odd round count, unknown schema, bad split sizes)."""


class TrainingError(NSCError, RuntimeError):
    """Training cannot proceed, e.g. only one class present."""
