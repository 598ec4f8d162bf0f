"""Shared exception roots.

Every error raised by the library derives from one of two bases so the CLI
can map it to a stable exit code: bad input (2) or an exhausted budget (3).
"""


class InputError(Exception):
    """The caller supplied something that violates a precondition."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class BudgetError(Exception):
    """A configured search or size cap was hit before an answer was found."""

    def __init__(self, message, lower_bound=None):
        super().__init__(message)
        self.lower_bound = lower_bound
