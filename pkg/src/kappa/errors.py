"""Exception hierarchy.

Every error raised on purpose by the package derives from ``KappaError`` so
callers (and the CLI) can separate numerical/input failures from bugs.
"""


class KappaError(Exception):
    """Base class for all package errors."""


class InputError(KappaError, ValueError):
    """Malformed or out-of-domain input."""


# rational functions and Blaschke products

class PoleHit(InputError):
    pass


class BoundaryPole(InputError):
    pass


class InteriorPole(InputError):
    pass


class NotGeneralizedSchur(KappaError):
    pass


class DegenerateValue(InputError):
    pass


# forms and inertia

class DuplicatePoints(InputError):
    pass


class PointOnBoundary(InputError):
    pass


class SamplePole(InputError):
    pass


class SpectralRadiusTooLarge(InputError):
    pass


class NonConvergence(KappaError):
    pass


class TruncationInsufficient(KappaError):
    pass


class TruncationUnstable(KappaError):
    """A certified count changed under refinement of a discretization."""

    def __init__(self, message, counts=None):
        super().__init__(message)
        self.counts = counts


# model spaces

class DegreeZero(InputError):
    pass


class PoleNearDisk(InputError):
    pass


class SingularDenominator(KappaError):
    pass


class NotInCommutant(InputError):
    pass


class RepeatedZeros(InputError):
    pass


# boundary machinery

class NoCleanGap(KappaError):
    def __init__(self, message, singular_values=None):
        super().__init__(message)
        self.singular_values = singular_values


class NodeCoincidence(KappaError, UserWarning):
    """Evaluation point on a node where the integrand jumps; issued as a warning."""


class AssemblyMismatch(KappaError):
    def __init__(self, message, discrepancy=None):
        super().__init__(message)
        self.discrepancy = discrepancy


class EvaluationTooCloseToLine(InputError):
    pass


# solvers

class Infeasible(KappaError):
    pass


class SearchFailed(KappaError):
    pass
