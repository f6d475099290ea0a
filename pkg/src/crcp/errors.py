"""Exception types shared across the package."""


class UsageError(ValueError):
    """A caller violated a documented precondition (bad arguments, wrong kind)."""


class VerificationError(AssertionError):
    """A soundness or approximation-ratio check failed.

    Carries the offending (range, answer, optimum) triple when available.
    """

    def __init__(self, message, query=None, answer=None, optimum=None):
        super().__init__(message)
        self.query = query
        self.answer = answer
        self.optimum = optimum
