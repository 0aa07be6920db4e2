"""Exception types shared across the package."""


class ContractError(ValueError):
    """An argument violates a documented precondition."""


class DomainError(ContractError):
    """A point lies outside the kernel or partition domain."""


class EmptyInputError(ContractError):
    """An operation received zero data points where at least one is required."""


class IllConditionedError(RuntimeError):
    """A linear solve failed even after a jitter retry.

    Attributes
    ----------
    jitter : float
        The diagonal jitter that was added on the retry.
    """

    def __init__(self, message: str, jitter: float = 0.0):
        super().__init__(message)
        self.jitter = jitter
