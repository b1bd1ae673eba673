"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the mathematical domain of the operation."""


class BudgetExhausted(RuntimeError):
    """A search or solve ran out of its configured budget.

    Carries enough context to reproduce or resume the run.
    """

    def __init__(self, message, last_tried=None, attempts=None, reason=None):
        super().__init__(message)
        self.last_tried = last_tried
        self.attempts = attempts
        self.reason = reason


class HypothesisViolated(Exception):
    """A check's stated hypothesis does not hold for the given inputs.

    Not an error in the caller's usage: the result object reports it.
    Raised only where no result object exists to carry the flag.
    """
