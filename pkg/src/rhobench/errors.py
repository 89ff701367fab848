"""Exception types shared across the toolkit."""


class RhobenchError(Exception):
    """Base class for all toolkit errors."""


class UnsupportedFunction(RhobenchError):
    """Requested function id is not part of the suite."""


class InvalidDimension(RhobenchError):
    """Dimension is too small for the requested function."""


class DimensionMismatch(RhobenchError):
    """Input vector length does not match the problem dimension."""


class NonFiniteInput(RhobenchError):
    """Input vector contains NaN or infinity."""


class InvalidPlateauSize(RhobenchError):
    """Plateau size must be positive and no larger than the domain width."""


class NotDiscretized(RhobenchError):
    """Operation requires a plateau size but none is set."""


class BudgetExhausted(RhobenchError):
    """Evaluation requested after the run budget was consumed."""


class BudgetTooSmall(RhobenchError):
    """Run budget is smaller than one generation."""


class InvalidDeviation(RhobenchError):
    """Deviation parameter of the integer mutation must be positive."""


class MarginRequiresDiscretization(RhobenchError):
    """A positive margin only makes sense on a discretized problem."""


class DegenerateMarginal(RhobenchError):
    """Marginal standard deviation underflowed; margin correction undefined."""


class UnsupportedDimension(RhobenchError):
    """Landscape grids are only available in 1 or 2 dimensions."""


class EmptyGroup(RhobenchError):
    """A metric was requested over an empty set of runs."""


class ConfigSyntax(RhobenchError):
    """Experiment configuration file could not be parsed."""


class ConfigInvalid(RhobenchError):
    """Experiment configuration contains an invalid value or pairing."""


class IoError(RhobenchError):
    """Reading or writing experiment artifacts failed."""
