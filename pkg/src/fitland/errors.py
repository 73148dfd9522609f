"""Exception types raised across the toolkit."""


class LandscapeError(ValueError):
    """Base class for all toolkit errors."""


class BudgetExceeded(LandscapeError):
    """Enumeration would visit more items than the configured ceiling."""


class UnbinnableFitness(LandscapeError):
    """Non-integral fitness values were seen but no binning was given."""


class LevelOutOfRange(LandscapeError):
    pass


class EmptyLevel(LandscapeError):
    """A statistic needs solutions at a level that has none."""


class GridMismatch(LandscapeError):
    pass


class InconsistentMultiplicity(LandscapeError):
    """Pair count of a TSP instance does not match the distance multiplicities."""


class InfeasibleProfile(LandscapeError):
    """A synthetic gap profile could not be realized; retry with a new seed."""
