"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """Arguments violate an operation's preconditions."""


class InvalidInstanceError(InvalidInputError):
    """A problem instance cannot be constructed from the given parameters."""


class ResourceLimitError(ValueError):
    """Requested size exceeds the simulator or brute-force guard."""


class InfeasibleError(ValueError):
    """A bitstring does not satisfy the permutation constraints of a TSP encoding."""


class NumericConsistencyError(ArithmeticError):
    """A quantity that must lie in a bounded range was found outside it."""


class DegenerateSpectrumError(ValueError):
    """Cost spectrum has c_min == c_max, so a normalized metric is undefined."""


class UndefinedMetricError(ValueError):
    """Metric is undefined for this instance (e.g. relative error with c_min == 0)."""
