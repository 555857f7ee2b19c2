"""Semantic exception hierarchy shared by all modules."""


class BetaSpectraError(Exception):
    """Base class for all package errors."""


class ParameterError(BetaSpectraError, ValueError):
    """A distribution or law parameter is outside its admissible range."""


class DomainError(BetaSpectraError, ValueError):
    """An evaluation point is outside the domain of the operation."""


class InvalidMatrixError(BetaSpectraError, ValueError):
    """A Jacobi matrix violates its structural constraints (a_k > 0)."""


class DegenerateMeasureError(BetaSpectraError, ValueError):
    """A discrete measure has coincident atoms; the Jacobi map is ill-posed."""


class NotPositiveDefiniteError(BetaSpectraError, ValueError):
    """A forward factorization hit a nonpositive pivot."""


class RangeError(BetaSpectraError, ValueError):
    """An index or order argument exceeds the guaranteed validity range."""


class PoleError(BetaSpectraError, ValueError):
    """Evaluation requested at (or numerically on top of) a pole."""
