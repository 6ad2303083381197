"""Exception types raised by the partitioning engine."""


class PartitionError(Exception):
    """Base class for every error raised by this package."""


class DataQualityError(PartitionError, ValueError):
    """A non-finite value reached an accumulator."""

    def __init__(self, t, y, where=None):
        self.t = t
        self.y = y
        self.where = where
        msg = f"non-finite value {y!r} at time step t={t}"
        super().__init__(f"{msg} ({where})" if where else msg)


class ContractError(PartitionError, ValueError):
    """An operation was called outside its precondition."""


class SequencingError(PartitionError, ValueError):
    """Time steps arrived out of order."""


class InsufficientDataError(PartitionError, ValueError):
    """Too few points for the requested test."""


class DegenerateFitError(PartitionError, ArithmeticError):
    """The two-line fit is perfect, so the standard F-statistic is undefined."""


class ConfigError(PartitionError, ValueError):
    """Invalid tuning parameters."""


class FormatError(PartitionError, ValueError):
    """Malformed input or output file."""


class IntegrityError(PartitionError, ValueError):
    """Saved segments do not tile the time axis."""
