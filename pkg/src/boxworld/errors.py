"""Exception hierarchy shared by all boxworld modules."""


class BoxworldError(ValueError):
    """Base class for every error raised on bad input or failed checks."""


class NegativeProbability(BoxworldError):
    pass


class CellNotNormalized(BoxworldError):
    def __init__(self, cell, total):
        self.cell = cell
        self.total = total
        super().__init__(f"cell (x,y)={cell} sums to {total}, expected 1")


class FormulaMismatch(BoxworldError):
    """Two independent evaluations of the same quantity disagreed."""


class MalformedSystem(BoxworldError):
    pass


class SignalingInput(BoxworldError):
    pass


class OutsideHull(BoxworldError):
    pass


class InexactInput(BoxworldError):
    pass


class LambdaOutOfRange(BoxworldError):
    pass


class BoxConsumed(BoxworldError):
    """A one-shot box side received a second input."""


class DomainError(BoxworldError):
    pass


class PrecisionExhausted(BoxworldError):
    pass


class DimensionMismatch(BoxworldError):
    pass


class UnknownCatalogEntry(BoxworldError):
    pass


class ParseError(BoxworldError):
    pass
