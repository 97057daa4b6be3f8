class ReleqError(Exception):
    """Base class for errors raised by this package."""


class DomainError(ReleqError, ValueError):
    """Parameters outside the region where a formula is defined."""


class CollisionError(DomainError):
    """Two bodies coincide."""

    def __init__(self, j, k, distance):
        self.pair = (j, k)
        self.distance = distance
        super().__init__(f"bodies {j} and {k} collide (distance {distance!r})")


class ConsistencyError(ReleqError, ArithmeticError):
    """Two independent routes to the same quantity disagree."""


class IntegrationError(ReleqError, FloatingPointError):
    """The integrator produced a non-finite state."""

    def __init__(self, step, message="non-finite state"):
        self.step = step
        super().__init__(f"{message} at step {step}")
