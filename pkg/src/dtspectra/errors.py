"""Exception hierarchy shared by all modules."""


class DiscreteTimeError(Exception):
    """Base class for every error raised by dtspectra."""


class DomainError(DiscreteTimeError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class CollapseError(DiscreteTimeError):
    """The radial coordinate crossed the origin during a simulation.

    Attributes:
        step: index of the step whose update produced ``r <= 0``.
    """

    def __init__(self, message, step):
        super().__init__(message)
        self.step = step


class SolverError(DiscreteTimeError):
    """Base class for root-finding failures."""


class BracketError(SolverError):
    """No sign change found while expanding the search bracket."""


class AmbiguityError(SolverError):
    """More than one sign change detected inside the search range."""


class ResidualError(SolverError):
    """A returned root does not satisfy its residual bound."""


class NegativeRadicandError(DiscreteTimeError):
    """The radius-profile radicand is not positive at the queried index.

    Attributes:
        n: the orbit index at which the radicand went nonpositive.
    """

    def __init__(self, message, n):
        super().__init__(message)
        self.n = n


class RangeError(DiscreteTimeError, ValueError):
    """A radius lies outside the interval covered by a radius profile."""


class MonotonicityError(DiscreteTimeError):
    """A radius profile was found to be non-increasing in ``n``."""


class ReconstructionCheckError(DiscreteTimeError):
    """The reconstructed potential failed its force-balance self-check."""
