"""Exception hierarchy shared by every imago module."""


class ImagoError(Exception):
    """Base class for all errors raised by imago."""


class InvalidEventError(ImagoError, ValueError):
    """An event bitmask does not fit the ambient algebra."""


class BudgetExceededError(ImagoError):
    """An exhaustive enumeration would exceed the configured budget."""

    def __init__(self, bound, budget):
        self.bound = bound
        self.budget = budget
        super().__init__(
            f"enumeration bound {bound} exceeds budget {budget} "
            "(set IMAGO_BUDGET to raise it)"
        )


class UnsatisfiableConstraintsError(ImagoError):
    """No selection function can satisfy the requested frame properties."""


class RetryCapExceededError(ImagoError):
    """Rejection sampling gave up before finding a conforming sample."""


class PreconditionError(ImagoError, ValueError):
    """An operation was called on inputs outside its domain."""


class ModelFileError(ImagoError):
    """A model file could not be parsed or violates its schema."""

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
