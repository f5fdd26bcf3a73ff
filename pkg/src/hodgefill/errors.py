"""Exception hierarchy.

Validation errors (bad input, malformed files, unsatisfiable preconditions)
derive from ValidationError; numerical failures (singular systems, missing
eigenvalues, unbounded programs) derive from NumericalError.  The CLI maps
the former to exit code 2 and the latter to exit code 3.
"""


class HodgefillError(Exception):
    pass


class ValidationError(HodgefillError):
    pass


class NumericalError(HodgefillError):
    pass


# -- complex / file format -------------------------------------------------

class ParseError(ValidationError):
    pass


class ClosureViolation(ValidationError):
    pass


class NotOrientable(ValidationError):
    pass


class DegreeOutOfRange(ValidationError):
    pass


class DegreeMismatch(ValidationError):
    pass


# -- geometry ---------------------------------------------------------------

class MetricUnrealizable(ValidationError):
    pass


class DegenerateSimplex(ValidationError):
    pass


class PointNotInSimplex(ValidationError):
    pass


class EmptyPointSet(ValidationError):
    pass


class ChartUnavailable(ValidationError):
    pass


# -- whitney / spectra ------------------------------------------------------

class SingularMass(NumericalError):
    pass


class NoPositiveEigenvalue(NumericalError):
    pass


# -- norms / filling / isoperimetry ------------------------------------------

class NotACycle(ValidationError):
    pass


class NotABoundary(ValidationError):
    pass


class NotCoexact(ValidationError):
    pass


class NotRational(ValidationError):
    pass


class IrrationalSlope(ValidationError):
    pass


class DegenerateGeodesic(ValidationError):
    pass


class ZeroClass(ValidationError):
    pass


class Disconnected(ValidationError):
    pass


class DimensionNot3(ValidationError):
    pass


class UnboundedProgram(NumericalError):
    pass


class SolverSizeExceeded(ValidationError):
    pass


# -- growth -------------------------------------------------------------------

class NonPositiveConstant(ValidationError):
    pass


class DegenerateClass(ValidationError):
    pass
