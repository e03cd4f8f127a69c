"""Exception types shared across the package."""


class KltextError(Exception):
    """Base class for every package-specific error."""


class CorpusIOError(KltextError):
    """A corpus file could not be read or decoded; message carries the path."""


class EmptyDocumentError(KltextError):
    """A document produced no countable wordforms; a zero vector has no unit norm."""


class EmptyClassError(KltextError):
    """A class directory or document list holds no documents."""


class DimensionMismatchError(KltextError):
    """Vector or matrix shapes do not agree."""


class ZeroDataError(KltextError):
    """All rows of a data matrix (or of a residual) are zero."""


class SingularCovarianceError(KltextError):
    """Covariance matrix is singular, or close enough that inversion is meaningless."""


class NullProjectionError(KltextError):
    """A query vector has no projection onto a class basis."""


class AllNullError(KltextError):
    """A query projects onto no class basis at all."""


class InfeasibleClassError(KltextError):
    """Even the identity mask fails the containment threshold: the class is
    inseparable from at least one other class."""

    def __init__(self, message: str, containment: float):
        super().__init__(message)
        self.containment = containment


class TooFewDocsError(KltextError):
    """A class has too few documents for the requested evaluation split."""
