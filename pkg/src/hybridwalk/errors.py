"""Exception hierarchy shared across the package.

The split mirrors the CLI's exit codes: configuration problems, exceeded
caps, and cache problems are distinguishable failure classes.
"""

from __future__ import annotations


class HybridwalkError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(HybridwalkError):
    """Invalid configuration, arguments, or incomplete input data."""


class IncompleteGridError(ConfigError):
    """A sweep result set is missing cells required by the consumer."""

    def __init__(self, missing: list[tuple]) -> None:
        self.missing = list(missing)
        listing = ", ".join(repr(cell) for cell in self.missing)
        super().__init__(f"missing cells: {listing}")


class CapError(HybridwalkError):
    """A configured hard cap was exceeded."""


class RoundCapError(CapError):
    """A fixed-length strategy exhausted its episode budget without reward."""


class StepCapError(CapError):
    """An unrestricted walk exceeded its step budget without reward."""


class CacheError(HybridwalkError):
    """Curve cache problems: missing, corrupt, or mismatched entries."""


class CacheMissError(CacheError):
    """No cache entry exists for the requested curve."""


class CacheCorruptError(CacheError):
    """A cache file exists but cannot be parsed or fails its self-checks."""


class CacheKeyMismatchError(CacheError):
    """A cache file's key fields do not match the requested curve."""


class CurveLookupError(CacheError):
    """A success curve does not contain the requested episode length."""


class SolverError(HybridwalkError):
    """A linear solve finished above the configured residual tolerance."""
