"""Exception types shared across the package."""


class DaglearnError(Exception):
    """Base class for all errors raised by this package."""


class CyclicGraphError(DaglearnError):
    """A weight matrix whose support contains a directed cycle or a self-loop."""


class InvalidSpecError(DaglearnError):
    """A graph/sampling specification violates its constraints."""


class ZeroDataError(DaglearnError):
    """The data matrix is identically zero, so no step size can be derived."""


class NonFiniteError(DaglearnError):
    """NaN or Inf encountered during solving; the step size or data is bad."""


class NonPositiveFitnessError(DaglearnError):
    """A fitness value is negative, which breaks inverse-proportional selection."""


class EmptyGridError(DaglearnError):
    """A penalty grid with no values was supplied."""


class ExplicitRefusalError(DaglearnError):
    """The requested exhaustive computation is too large to run."""


class MalformedCsvError(DaglearnError):
    """A dataset CSV could not be parsed.

    `row` and `column` are 1-based file coordinates when known.
    """

    def __init__(self, message: str, row: int | None = None, column: int | None = None):
        loc = ""
        if row is not None:
            loc = f" (row {row}" + (f", column {column}" if column is not None else "") + ")"
        super().__init__(message + loc)
        self.row = row
        self.column = column


class MalformedEdgeListError(DaglearnError):
    """An edge-list TSV could not be parsed or validated.

    `line` is the 1-based file line when known.
    """

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message + (f" (line {line})" if line is not None else ""))
        self.line = line
