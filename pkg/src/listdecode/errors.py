"""Exception types shared across the package."""


class ListDecodeError(Exception):
    """Base class for all domain errors raised by this package."""


class NonPrimeModulus(ListDecodeError, ValueError):
    pass


class InverseOfZero(ListDecodeError, ZeroDivisionError):
    pass


class ReducibleModulus(ListDecodeError, ValueError):
    pass


class LengthMismatch(ListDecodeError, ValueError):
    pass


class SymbolOutOfRange(ListDecodeError, ValueError):
    pass


class IndexOutOfRange(ListDecodeError, IndexError):
    pass


class SizeOverBudget(ListDecodeError):
    """An exhaustive computation would exceed its configured budget."""

    def __init__(self, what: str, size: int, budget: int):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(f"{what}: size {size} exceeds budget {budget}")
