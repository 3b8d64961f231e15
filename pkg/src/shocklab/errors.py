"""Exception hierarchy shared by all shocklab modules."""


class ShockLabError(ValueError):
    """Base class for every error raised by shocklab."""


class ExteriorJump(ShockLabError):
    """A step function has a breakpoint outside the grid span."""


class IncompatibleFunctions(ShockLabError):
    """Two grid functions live on different grids or have different far states."""


class FarStateMismatch(IncompatibleFunctions):
    pass


class MassMismatch(ShockLabError):
    """The zero-mass condition needed by a Wasserstein distance is violated."""


class NotAShock(ShockLabError):
    """The left state does not exceed the right state."""


class NotDecreasing(ShockLabError):
    """Input data is required to be decreasing."""


NonDecreasingInput = NotDecreasing


class MissingLambda(ShockLabError):
    """Lax-Friedrichs flux evaluated without a mesh ratio."""


class NoWaveSpeed(ShockLabError):
    """The flux has zero characteristic speed on the whole state box."""


class CflViolation(ShockLabError):
    pass


class InsufficientWindow(ShockLabError):
    pass


class NoConvergence(ShockLabError):
    pass


class TailTooSharp(ShockLabError):
    """No tail samples above the noise floor; the decay rate is infinite."""

    alpha = float("inf")


class IncompatibleCoefficients(ShockLabError):
    pass


class WindowTooSmall(ShockLabError):
    pass


class DegenerateError(ShockLabError):
    """Observed order requested from a non-positive error."""


class EmptyTable(ShockLabError):
    pass
