"""Exception hierarchy shared by every module."""


class TorusClosureError(Exception):
    """Base class for all errors raised by this package."""


class InputError(TorusClosureError, ValueError):
    pass


class DomainError(TorusClosureError, ValueError):
    pass


class StructureError(TorusClosureError, ValueError):
    pass


class PrecisionExhausted(TorusClosureError):
    """Escalation hit the precision cap while a verdict was still ambiguous."""

    def __init__(self, message, prec=None):
        super().__init__(message)
        self.prec = prec


class ReducibleError(InputError):
    def __init__(self, message, factors=None):
        super().__init__(message)
        self.factors = factors or []


class NotGaloisError(TorusClosureError):
    pass


class NotUnitError(TorusClosureError):
    def __init__(self, message, element=None):
        super().__init__(message)
        self.element = element


class RankError(TorusClosureError):
    pass


class SearchEmpty(TorusClosureError):
    pass


class IsotropicError(TorusClosureError):
    pass


class ParseError(InputError):
    def __init__(self, message, position=None, token=None):
        if position is not None:
            message = f"{message} (at position {position}: {token!r})"
        super().__init__(message)
        self.position = position
        self.token = token


class ConsistencyError(TorusClosureError):
    """An unconditional invariant was violated; indicates a bug or bad input."""


class DivisionByZero(InputError, ZeroDivisionError):
    pass
