"""
Error types for the list-decoding lab.

Every domain error is a ValueError so callers that only care about "bad input"
can catch one thing. Messages say what was wrong and, for caps, how to lift
the limit.
"""


class LabError(ValueError):
    """Base class for all ldlab errors"""


class NotPrimePower(LabError):
    pass


class OrderTooLarge(LabError):
    pass


class DivisionByZero(LabError, ZeroDivisionError):
    pass


class RankDeficient(LabError):
    pass


class LengthMismatch(LabError):
    pass


class EnumerationTooLarge(LabError):
    pass


class TooManyErasures(LabError):
    pass


class DuplicateEvalPoints(LabError):
    pass


class DegreeTooLarge(LabError):
    pass


class FieldMismatch(LabError):
    pass


class DomainError(LabError):
    pass


class RadiusTooLarge(LabError):
    pass


class TrivialCode(LabError):
    pass


class MNotPowerOfTwo(LabError):
    pass


class MExceedsN(LabError):
    pass


class AdviceSpaceTooLarge(LabError):
    pass


class SpecInvalid(LabError):
    pass


class ParseError(LabError):
    """Malformed input file; carries 1-based line and column"""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class _Signal:
    """Named sentinel returned (never raised) by erasure decoding"""

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name

    def __bool__(self) -> bool:
        return False


Ambiguous = _Signal("Ambiguous")
NoCodeword = _Signal("NoCodeword")
