"""Errores de copcalc.

Two families: `SchemaError` for malformed input (the CLI maps it to exit code 2) and
`PreconditionError` for inputs that are well formed but violate a mathematical
hypothesis (exit code 3).
"""

from __future__ import annotations


class CopcalcError(ValueError):
    """Base de todos los errores levantados por copcalc."""


class SchemaError(CopcalcError):
    """Payload or argument does not match the expected shape."""


class PreconditionError(CopcalcError):
    """A mathematical precondition of an operation does not hold."""


class DegenerateMapError(PreconditionError):
    pass


class PoleError(PreconditionError):
    pass


class PoleInsideDiskError(PreconditionError):
    pass


class NotParabolicError(PreconditionError):
    pass


class BoundaryMismatchError(PreconditionError):
    pass


class NotASelfMapError(PreconditionError):
    pass


class NotInAngularDerivativeSetError(PreconditionError):
    pass


class DegenerateJetError(PreconditionError):
    pass


class NotCanonicalError(PreconditionError):
    pass


class NotInImageAlgebraError(PreconditionError):
    """Symbol matrix whose value at t = 0 is not a scalar multiple of the identity."""


class OutsideTranslationRangeError(PreconditionError):
    pass


class InadmissibleSymbolError(PreconditionError):
    """The inducing map φ of a context is not admissible."""


class MalformedProfileError(PreconditionError):
    pass


class ConstructionOverflowError(PreconditionError):
    pass


class InternalConsistencyError(RuntimeError):
    """An identity guaranteed by theory failed beyond tolerance."""
