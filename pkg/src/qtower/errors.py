"""Exception hierarchy shared by every layer of the tower."""


class TowerError(Exception):
    """Base class for all qtower errors."""


class DimensionMismatch(TowerError, ValueError):
    pass


class ShapeMismatch(DimensionMismatch):
    pass


class NotHermitian(TowerError, ValueError):
    pass


class NotPSD(TowerError, ValueError):
    pass


class NotIsometry(TowerError, ValueError):
    pass


class NotContraction(TowerError, ValueError):
    pass


class LevelViolation(TowerError, ValueError):
    pass


class SplitOutOfRange(TowerError, ValueError):
    pass


class ArityMismatch(TowerError, TypeError):
    pass


class ObjectMismatch(TowerError, ValueError):
    pass


class InvalidChannel(TowerError, ValueError):
    pass


class ChannelsDiffer(TowerError, ValueError):
    pass


class AncillaOrder(TowerError, ValueError):
    pass


class BadPartition(TowerError, ValueError):
    pass


class NoKnownPartition(TowerError, ValueError):
    pass


class AbsorptionFails(TowerError, ValueError):
    pass


class MatrixFormatError(TowerError, ValueError):
    pass


class DslSyntaxError(TowerError, SyntaxError):
    """Parse failure carrying a 1-based line and column."""

    def __init__(self, message, line, column):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


class TypeMismatch(TowerError, TypeError):
    pass


class LevelError(TowerError, TypeError):
    pass


class LevelTooLow(TowerError, ValueError):
    pass
