"""Exception hierarchy shared by all modules."""


class SymbolicMarkovError(ValueError):
    """Base class for data errors raised by this package."""


class DegenerateSignal(SymbolicMarkovError):
    """Signal has no spread (constant) and cannot be normalized or binned."""


class TooFewDistinctValues(SymbolicMarkovError):
    """Fewer distinct sample values than requested partition cells."""


class DegeneratePartition(SymbolicMarkovError):
    """Fitted boundaries collapse or leave a cell empty."""


class SequenceTooShort(SymbolicMarkovError):
    pass


class DepthTooLarge(SymbolicMarkovError):
    pass


class NotStochastic(SymbolicMarkovError):
    pass


class NoConvergence(SymbolicMarkovError):
    pass


class DimensionMismatch(SymbolicMarkovError):
    pass


class NonPositiveEntry(SymbolicMarkovError):
    pass


class ShapeMismatch(SymbolicMarkovError):
    pass


class InvalidSpec(SymbolicMarkovError):
    pass


class ConfigError(SymbolicMarkovError):
    pass


class NoAcfMinimumWarning(UserWarning):
    """No local minimum of the autocorrelation within the searched lags."""


class NonMixingWarning(UserWarning):
    """Second eigenvalue modulus is (numerically) one, or depth was capped."""
