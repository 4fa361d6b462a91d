"""Exception types shared across the package."""


class GaussDualError(Exception):
    """Base class for all gaussdual errors."""


class NotPositiveDefinite(GaussDualError):
    """A matrix that must be symmetric positive-definite is not.

    ``pivot_index`` is the 0-based index of the first failing pivot of the
    attempted factorization, or None when the failure is not pivot-local.
    """

    def __init__(self, message, pivot_index=None):
        super().__init__(message)
        self.pivot_index = pivot_index


class NotAForest(GaussDualError):
    """An operation requiring an acyclic graph found a cycle."""


class DimensionMismatch(GaussDualError):
    """Array shapes are inconsistent with the declared model dimensions."""


class InfeasibleStructure(GaussDualError):
    """A generator spec cannot be satisfied (e.g. k = 0)."""


class ModelFormatError(GaussDualError):
    """A model file does not conform to the JSON schema."""
