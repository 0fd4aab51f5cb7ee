"""Exceptions raised by the dynamics, return-map and attractor routines."""


class GammaCollision(ValueError):
    """A point sits on (or within tolerance of) an indifference set.

    The map is only single-valued away from these sets, so the orbit cannot be
    continued deterministically.
    """

    def __init__(self, message, point=None, partial=None):
        super().__init__(message)
        self.point = point
        self.partial = partial


class ThresholdCollision(ValueError):
    """A point of B lies within tolerance of a return-branch threshold b_k."""

    def __init__(self, message, point=None, partial=None):
        super().__init__(message)
        self.point = point
        self.partial = partial


class BoundViolation(AssertionError):
    """A computed first-return time exceeded the analytic bound."""


class BifurcationBoundary(ArithmeticError):
    """Parameters sit on a breakpoint of the head or tail function.

    ``report`` carries whatever could be computed (may be ``None``).
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class OrbitClosureFailure(RuntimeError):
    """A periodic orbit lifted from a branch fixed point did not close."""


class BracketFailure(ValueError):
    """No sign change was found for a root bracket."""
