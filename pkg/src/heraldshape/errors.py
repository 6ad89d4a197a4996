"""Exception and warning types shared across the package."""


class ShapingError(Exception):
    """Base class for all errors raised by heraldshape."""


class InvalidArgument(ShapingError, ValueError):
    """An argument is outside its allowed domain."""


class ResolutionError(ShapingError):
    """A grid is too coarse or too short for the requested computation."""


class ContainmentError(ResolutionError):
    """A pulse is truncated by the edges of its grid."""


class StateError(ShapingError):
    """An operation was applied to a value in the wrong state."""


class NoHeraldError(ShapingError):
    """A detection at the requested instant has negligible probability."""


class ConfigError(ShapingError):
    """A scenario configuration could not be parsed or validated."""


class AliasingWarning(UserWarning):
    """A spectrum has not decayed at the edges of its frequency grid."""


class RegimeWarning(UserWarning):
    """Parameters fall outside the regime where the shaping model applies."""


class SnapWarning(UserWarning):
    """An off-grid time was snapped to the nearest grid sample."""
