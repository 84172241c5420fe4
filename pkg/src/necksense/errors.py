"""Exception taxonomy shared across the toolkit.

Each class maps to one CLI exit code so scripted callers can branch on
failure kind without parsing stderr.
"""


class NeckSenseError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ConfigError(NeckSenseError):
    """Bad configuration: unknown key, wrong type, unparseable file."""

    exit_code = 2


class InvalidArgumentError(ConfigError):
    """A value is structurally valid but out of the documented domain."""

    exit_code = 2


class DataError(NeckSenseError):
    """Missing, corrupt, or checksum-mismatched dataset content."""

    exit_code = 3


class TrainingError(NeckSenseError):
    """Model training or checkpoint chaining failed."""

    exit_code = 4
