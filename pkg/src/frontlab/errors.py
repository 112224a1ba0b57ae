"""Exception types raised across frontlab."""


class FrontError(Exception):
    """Base class for all frontlab errors."""


class InvalidInput(FrontError, ValueError):
    pass


class InvalidIndex(FrontError, IndexError):
    pass


class InvalidSignature(InvalidInput):
    pass


class InsufficientData(InvalidInput):
    pass


class InvalidConfig(InvalidInput):
    pass


class DegenerateState(FrontError, ArithmeticError):
    pass


class NumericalFailure(FrontError, ArithmeticError):
    """A non-finite value showed up where only finite values are allowed."""
