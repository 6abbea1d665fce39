"""Exception types raised across the package.

Every error derives from :class:`CompositeError`, which is itself a
``ValueError`` so callers that only care about bad input can catch that.
"""


class CompositeError(ValueError):
    """Base class for all data and numerical errors."""


class NonFiniteInput(CompositeError):
    pass


class ZeroVarianceColumn(CompositeError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"column {index} has zero variance")


class DimensionMismatch(CompositeError):
    pass


class SingularAfterRegularization(CompositeError):
    pass


class DegenerateVariance(CompositeError):
    pass


class InvalidWeights(CompositeError):
    pass


class InfeasibleRho(CompositeError):
    pass


class TargetUnreachable(CompositeError):
    pass


class NotPositiveDefinite(CompositeError):
    pass


class WindowTooShort(CompositeError):
    pass


class EmptyFile(CompositeError):
    pass


class RaggedRows(CompositeError):
    def __init__(self, line, expected, found):
        self.line = line
        super().__init__(f"line {line}: expected {expected} fields, found {found}")


class ParseError(CompositeError):
    def __init__(self, line, column, text):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: cannot parse {text!r}")
