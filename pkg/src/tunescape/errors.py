"""Exception types shared across the package."""


class TunescapeError(Exception):
    """Base class for package-specific errors."""


class DataFormatError(TunescapeError):
    """An input file or schema violates the expected format.

    Carries enough position context (path, row, column) to locate the
    offending cell or field.
    """

    def __init__(self, message, path=None, row=None, column=None):
        parts = []
        if path is not None:
            parts.append(str(path))
        if row is not None:
            parts.append(f"row {row}")
        if column is not None:
            parts.append(f"column {column!r}")
        if parts:
            message = f"{message} ({', '.join(parts)})"
        super().__init__(message)
        self.path = path
        self.row = row
        self.column = column


class AnalysisError(TunescapeError):
    """An analysis outcome is degenerate rather than malformed."""


class SparseLandscapeError(AnalysisError):
    """The landscape view has no usable neighborhood structure."""


class UndefinedFeatureError(AnalysisError):
    """A landscape feature is undefined on the given view."""

    def __init__(self, feature, reason):
        super().__init__(f"feature {feature!r} undefined: {reason}")
        self.feature = feature
        self.reason = reason


class UndefinedMetricError(AnalysisError):
    """An accuracy or ranking metric is undefined for the given input."""


class IncompleteMatrixError(AnalysisError):
    """A model-feature matrix cell could not be computed."""

    def __init__(self, model, column, reason):
        super().__init__(f"matrix cell ({model!r}, {column!r}) undefined: {reason}")
        self.model = model
        self.column = column
        self.reason = reason
