"""Exception types shared across the toolkit."""


class InvalidInputError(ValueError):
    """Input violates a documented precondition (non-finite values, bad shapes, ...)."""


class OrientationError(InvalidInputError):
    """Polygon vertices are ordered clockwise where counterclockwise is required."""


class DegenerateGeometryError(InvalidInputError):
    """Geometry has no meaningful answer (collinear point set, zero-area polygon)."""


class UndefinedMetricError(ValueError):
    """Metric requested on an accumulator that cannot support it (zero perimeter)."""


class NoDirectionError(ValueError):
    """preferred_direction requested for a vanishing tensor magnitude."""


class UnsupportedFormatError(ValueError):
    """File uses a format feature outside the supported subset; names the feature."""


class DecodeError(ValueError):
    """File is recognized but its content is corrupt or inconsistent."""


class ParseError(ValueError):
    """Text input failed to parse; carries the 1-based line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptySelectionError(ValueError):
    """An aggregation (histogram) was requested over an empty selection."""
