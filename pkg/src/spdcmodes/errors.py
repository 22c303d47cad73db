"""Exception types raised across the package."""


class SpdcModesError(Exception):
    """Base class for all package errors."""


class DomainError(SpdcModesError, ValueError):
    """An argument lies outside the domain an operation supports."""


class NonConvergence(SpdcModesError, RuntimeError):
    """An adaptive numerical scheme did not reach its tolerance."""


class ResolutionError(SpdcModesError, ValueError):
    """A sampling grid is too coarse for the requested operation."""


class GridMismatchError(SpdcModesError, ValueError):
    """Two sampled fields do not share the same grid."""


class ConvergenceFailure(SpdcModesError, RuntimeError):
    """A reconstruction optimizer stalled above its residual threshold."""


class IncompleteData(SpdcModesError, ValueError):
    """A measurement set is missing records required for reconstruction."""


class ConfigError(SpdcModesError, ValueError):
    """A run configuration is invalid."""
