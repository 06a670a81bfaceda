"""Exception types raised across the package."""


class QCAError(Exception):
    """Base class for every error raised by qcalab."""


class ConditionViolation(QCAError):
    """A coin family fails one of its algebraic conditions."""

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)


class NotHermitian(QCAError, ValueError):
    pass


class NotUnitary(QCAError, ValueError):
    pass


class InvalidLattice(QCAError, ValueError):
    pass


class IndexOutOfRange(QCAError, IndexError):
    pass


class BranchCut(QCAError, ValueError):
    """An eigenphase sits too close to pi for an unambiguous logarithm."""


class ZeroMomentum(QCAError, ValueError):
    pass


class DimensionOverflow(QCAError, ValueError):
    pass


class DuplicateFermionMode(QCAError, ValueError):
    pass


class TooManyParticles(QCAError, ValueError):
    pass


class UnknownMode(QCAError, KeyError):
    pass


class MissingPhase(QCAError, KeyError):
    pass


class EmptyModes(QCAError, ValueError):
    pass


class DegenerateMatchAmbiguity(UserWarning):
    """Branch matching along a path could not separate two candidates."""
