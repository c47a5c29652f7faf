"""Exception hierarchy shared by every qmc module."""


class QMCError(Exception):
    """Base class for all library errors."""


class ShapeError(QMCError, ValueError):
    """Operand dimensions do not agree."""


class ZeroSupportError(QMCError):
    """The measurement projector has no overlap with the training state."""

    def __init__(self, support: float, message: str | None = None):
        self.support = support
        super().__init__(message or f"zero support (Tr[pi rho pi] = {support:.3e})")


class DegenerateFeatureError(QMCError, ValueError):
    """A feature column is constant and cannot be min-max scaled."""


class InvalidCategoryError(QMCError, ValueError):
    """A categorical value lies outside 1..m."""


class ZeroVectorError(QMCError, ValueError):
    """A feature vector has zero norm and cannot be normalized."""


class DegenerateSuperpositionError(QMCError):
    """The superposition of training states cancels exactly."""


class EmptyTrainingError(QMCError):
    """Finalize was called before any sample was accumulated."""


class UnknownDatasetError(QMCError, ValueError):
    pass


class InvalidSplitError(QMCError, ValueError):
    pass


class ParseError(QMCError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SchemaError(QMCError, ValueError):
    pass


class UnsupportedDimensionError(QMCError, ValueError):
    pass
