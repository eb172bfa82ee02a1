"""Exception types, grouped by the CLI exit code they map to."""


class OcclumaskError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(OcclumaskError):
    """Bad configuration file or option value (exit code 2)."""


class DataError(OcclumaskError):
    """Bad input data: missing files, malformed images, shape mismatches (exit code 2)."""


class NumericError(OcclumaskError):
    """Numerical failure: degenerate matrices, non-finite results (exit code 3)."""
