"""Exception types shared across the package.

Every error that a public operation can raise is defined here so the CLI
can map failures to exit codes in one place.
"""


class ConesumError(Exception):
    """Base class for all library errors."""


class ConfigError(ConesumError):
    """Malformed or inconsistent run configuration."""


# -- field construction and arithmetic ---------------------------------------

class NotIrreducible(ConesumError):
    pass


class NotTotallyReal(ConesumError):
    pass


class DegenerateRoots(ConesumError):
    pass


class ZeroInput(ConesumError):
    pass


class NotAUnit(ConesumError):
    pass


class NotTotallyPositive(ConesumError):
    pass


class SearchBoundExceeded(ConesumError):
    pass


class MixedExponents(ConesumError):
    """Sum of a rational and an irrational scaled-rational value."""


# -- geometry -----------------------------------------------------------------

class NotFullDim(ConesumError):
    pass


class NotSalient(ConesumError):
    pass


class DegenerateVertex(ConesumError):
    pass


class PointNotInterior(ConesumError):
    pass


class RayNotRational(ConesumError):
    pass


# -- cycles -------------------------------------------------------------------

class NotACycle(ConesumError):
    pass


class NotTopDegree(ConesumError):
    pass


# -- fans ---------------------------------------------------------------------

class UnitDoesNotPreserveM(ConesumError):
    pass


class ConeNotInFan(ConesumError):
    pass


class OverlappingStars(ConesumError):
    pass


class RayOnExistingFace(ConesumError):
    pass


# -- summation ----------------------------------------------------------------

class SingularAtX0(ConesumError):
    """An evaluation point lies on a singular hyperplane of a term."""


class DependentTuple(ConesumError):
    pass


class NotConvexUnion(ConesumError):
    pass


# -- unit search --------------------------------------------------------------

class DegreeTooSmall(ConesumError):
    pass


class SingularMatrix(ConesumError):
    pass


class PrecisionExhausted(ConesumError):
    pass


class WindowTooSmall(ConesumError):
    pass


# -- arithmetic / L-values ----------------------------------------------------

class MissingIntersectionEntry(ConesumError):
    pass


class CutoffTooSmall(ConesumError):
    pass
