"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Operand shapes are inconsistent."""


class RankDeficiencyError(ValueError):
    """A matrix that must have full column rank does not."""


class InfeasibleError(ValueError):
    """The feasible set of a brute-force search is empty."""


class UnsupportedInstanceError(ValueError):
    """The requested operation only supports a restricted class of instances."""


class ConfigError(ValueError):
    """A run configuration failed validation.

    ``messages`` lists every problem found, not only the first one.
    """

    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("\n".join(self.messages))


class DivergenceError(FloatingPointError):
    """The iteration produced a non-finite gradient.

    Carries the iteration index and, when available, the partial
    :class:`~grls.solver.SolveResult` accumulated before the failure.
    """

    def __init__(self, iteration, message=None, partial=None):
        self.iteration = iteration
        self.partial = partial
        super().__init__(message or f"non-finite gradient at iteration {iteration}")
