"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto process exit codes: configuration problems exit
with 2, data problems (unreadable, malformed, or inconsistent inputs)
with 3, and everything else that goes wrong at runtime with 4.
"""

from __future__ import annotations


class FgfError(Exception):
    """Base class for all library errors."""


class ConfigError(FgfError):
    """Invalid configuration: bad parameter values, missing paths, bad flags."""

    exit_code = 2


class DataError(FgfError):
    """Invalid data: parse failures, schema mismatches, inconsistent inputs."""

    exit_code = 3


class StageError(FgfError):
    """Runtime failure inside a pipeline stage (missing upstream artifact, ...)."""

    exit_code = 4
