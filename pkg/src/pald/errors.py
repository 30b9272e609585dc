"""Exception types raised by the pald package."""


class PaldError(Exception):
    """Base class for all pald errors."""


class DuplicatePoints(PaldError):
    """Two points have zero dissimilarity; the framework assumes d(z,z) < d(z,y)."""


class NonSymmetric(PaldError):
    """A precomputed dissimilarity matrix is not symmetric."""


class NegativeEntry(PaldError):
    """A dissimilarity matrix contains a negative entry."""


class IndexOutOfRange(PaldError, IndexError):
    """A point index is outside [0, n)."""


class DimensionMismatch(PaldError):
    """A point or vector has the wrong dimensionality or length."""


class FormatError(PaldError):
    """A cache file is malformed or has an unsupported version."""


class SizeMismatch(PaldError):
    """Dissimilarity matrices being fused differ in size."""


class BadWeights(PaldError):
    """Fusion weights are negative or do not sum to one."""


class TensorTooLarge(PaldError):
    """Dense relevance/support tensors are limited to n <= 512."""


class KTooLarge(PaldError):
    """k exceeds the number of available reference points."""


class DegenerateLabels(PaldError):
    """AUC metrics need at least one positive and one negative label."""


class NoLabels(PaldError):
    """Classification needs a cache built with labels."""


class UnknownMethod(PaldError):
    """Unrecognized classification method name."""


class TooFewSamples(PaldError):
    """Not enough samples per class for the requested fold count."""


class NotTwoDimensional(PaldError):
    """Decision boundary grids require 2-d reference data."""
