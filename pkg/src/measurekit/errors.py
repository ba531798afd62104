"""Exception hierarchy shared by every module."""


class MeasureKitError(ValueError):
    """Base class for all library errors."""


class ZeroTotalMeasure(MeasureKitError):
    pass


class IndexOutOfRange(MeasureKitError, IndexError):
    pass


class SpaceMismatch(MeasureKitError):
    pass


class BadConvexWeights(MeasureKitError):
    pass


class InvalidMeasure(MeasureKitError):
    pass


class InvalidKernel(MeasureKitError):
    pass


class InvalidMap(MeasureKitError):
    pass


class NotBijective(MeasureKitError):
    pass


class NotProductSpace(MeasureKitError):
    pass


class OracleNotAffine(MeasureKitError):
    pass


class OracleNotNormalized(MeasureKitError):
    pass


class ZeroProbabilityEvent(MeasureKitError):
    pass


class BadRelation(MeasureKitError):
    pass


class NotPrelinear(MeasureKitError):
    pass


class InvalidEmbedding(MeasureKitError):
    pass


class DimensionMismatch(MeasureKitError):
    pass


class InvalidQuantumObject(MeasureKitError):
    pass


class MultiKrausUnsupported(MeasureKitError):
    pass
