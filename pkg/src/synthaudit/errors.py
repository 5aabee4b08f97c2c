"""Exception hierarchy shared across the toolkit."""


class SynthAuditError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(SynthAuditError):
    """Invalid configuration: bad config file, bad parameters, bad QI setup."""


class DataError(SynthAuditError):
    """Invalid data: unreadable file, schema mismatch, bad cell values."""
