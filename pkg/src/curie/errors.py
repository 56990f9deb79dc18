"""Exception types shared across the package."""


class CurieError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(CurieError):
    """Invalid configuration: bad parameter values, shape mismatches, etc."""


class DataError(CurieError):
    """Problem with an input dataset: schema mismatch or malformed row."""


class SchemaError(DataError):
    """CSV header does not match the declared schema."""


class RowError(DataError):
    """A data row could not be parsed under the schema's policy."""


class StateError(CurieError):
    """Operation invoked on a learner/tracker in the wrong state."""


class PropagationError(CurieError):
    """Generation fill exhausted its budget with empty cells remaining."""


class OrderingError(CurieError):
    """Timestamps passed out of order."""


class ComparisonError(CurieError):
    """Reports cannot be compared (incompatible checkpoints, too few runs)."""
