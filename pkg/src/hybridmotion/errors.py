"""Exception types raised by the simulation package."""


class SimulationError(Exception):
    """Base class for every error this package raises deliberately."""


class DomainError(SimulationError, ValueError):
    """An input value violates a model's domain (non-finite, out of range, ...)."""


class GuardMismatchError(SimulationError):
    """A jump was requested for a state that does not lie on the claimed guard."""


class NumericalDivergenceError(SimulationError):
    """Integration produced a non-finite state; carries the offending sample."""

    def __init__(self, message: str, t: float = float("nan"),
                 x: float = float("nan"), v: float = float("nan")):
        super().__init__(message)
        self.t = t
        self.x = x
        self.v = v


class ZenoSuspicionError(SimulationError):
    """The jump budget was exhausted; carries the partial trajectory."""

    def __init__(self, message: str, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
