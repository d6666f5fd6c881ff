from __future__ import annotations

from typing import ClassVar


class SqueezeError(Exception):
    """Base class for Squeeze-Tools Errors."""

    exit_code: ClassVar[int] = 4


class ConfigError(SqueezeError, ValueError):
    """Raise when a run configuration can not be parsed or validated."""

    exit_code = 2


class DomainError(SqueezeError, ValueError):
    """Raise when a parameter is outside of an operation's domain."""

    exit_code = 3


class NumericError(SqueezeError, ArithmeticError):
    """Raise when a simulation or an analysis produces non-finite values."""

    exit_code = 4
