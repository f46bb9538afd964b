"""Exception types shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 1, DataError -> 2.
Pure geometry/controller functions raise ValueError for domain violations
(e.g. non-positive altitude) since those indicate caller bugs, not bad data.
"""

from __future__ import annotations


class HerdNavError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(HerdNavError):
    """Invalid configuration, manifest, or command-line usage."""


class DataError(HerdNavError):
    """Malformed or inconsistent input data (telemetry, annotations, joins)."""


class SchemaError(DataError):
    """An input file is missing a required/mapped column."""


class NoDetectionsError(ValueError):
    """An operation that requires at least one detection got an empty list."""
