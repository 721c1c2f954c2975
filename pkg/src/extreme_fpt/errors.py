"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input lies outside the mathematical domain of an operation."""


class ValidationError(ValueError):
    """Structured input (tables, configs) fails its consistency checks."""


class SolverError(RuntimeError):
    """An iterative solver failed to bracket or converge."""


class InfiniteMomentError(ValueError):
    """The requested moment diverges for the given tail class and (k, N)."""


class RescalingUndefinedError(DomainError):
    """The normalizing-sequence construction is undefined at this N.

    Carries the minimal N for which the construction becomes valid, so
    callers can report it.
    """

    def __init__(self, message, min_valid_n=None):
        super().__init__(message)
        self.min_valid_n = min_valid_n
