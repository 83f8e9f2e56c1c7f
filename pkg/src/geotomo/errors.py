"""Exception taxonomy.

Everything raised on purpose derives from GeotomoError so callers can
distinguish domain failures from genuine bugs.  InvalidInputError and its
children mark bad user input; ConvergenceError marks an iterative solver
that hit its cap.  The CLI maps these onto exit codes.
"""


class GeotomoError(Exception):
    """Base class for all deliberate failures."""


class InvalidInputError(GeotomoError, ValueError):
    """Bad parameters, malformed data, or violated preconditions."""


class DuplicateDirectionError(InvalidInputError):
    """Two directions coincide within tolerance where distinctness is required."""


class SpanError(InvalidInputError):
    """Input directions or generators do not span the ambient space."""


class UnsupportedDimensionError(InvalidInputError):
    """Operation not defined for this ambient dimension."""


class InvalidBodyError(InvalidInputError):
    """Body fails a structural precondition (e.g. not full-dimensional)."""


class UnboundedPolytopeError(GeotomoError):
    """Halfspace intersection is unbounded (normals do not positively span)."""


class PositiveHullError(InvalidInputError):
    """Measurement directions do not positively span the ambient space."""


class EvennessError(InvalidInputError):
    """Measure is not even (atoms do not pair up antipodally)."""


class ClosureError(InvalidInputError):
    """Measure barycenter is not at the origin within tolerance."""


class DegenerateMeasureError(InvalidInputError):
    """Measure is concentrated on a great subsphere; no body exists."""


class ConvergenceError(GeotomoError):
    """Iterative solver exhausted its iteration budget."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
