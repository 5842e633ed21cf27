"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: UsageError -> 2, ConfigError -> 3,
FormatError -> 3, anything else -> 4.
"""


class PourlabError(Exception):
    """Base class for all package errors."""


class ConfigError(PourlabError):
    """A configuration value violates its invariant. Message names the field."""


class UsageError(PourlabError):
    """An operation was called outside its contract (e.g. step after done)."""


class FormatError(PourlabError):
    """A persisted file (artifact, manifest, log) is malformed. Message names the field."""


class NumericError(PourlabError):
    """A computation received or produced non-finite values."""
