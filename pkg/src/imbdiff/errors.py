"""Shared exception types.

ConfigError maps to CLI exit code 2, CheckFailure to 1, NumericsError to 3.
"""


class ConfigError(ValueError):
    """Bad or inconsistent configuration (file, flag, or constructor arg)."""


class CheckFailure(RuntimeError):
    """A verification command (gradcheck, decompose) found a violation."""


class NumericsError(RuntimeError):
    """Non-finite values where finite ones are required (loss, state, output)."""
