"""Exception hierarchy shared by the library and the CLI."""

from __future__ import annotations


class CoalgebraError(Exception):
    """Domain error: the input is well-formed but the operation does not apply."""


class FunctorMismatch(CoalgebraError):
    pass


class NotWellFounded(CoalgebraError):
    def __init__(self, message: str, states=()):
        super().__init__(message)
        self.states = tuple(states)


class NotWellPointed(CoalgebraError):
    """Raised with a witness: either a proper subcoalgebra containing the point
    (``kind == "unreachable"``, witness = reachable state set) or a pair of
    behaviorally equivalent states (``kind == "mergeable"``)."""

    def __init__(self, message: str, kind: str, witness):
        super().__init__(message)
        self.kind = kind
        self.witness = witness


class FullExpansionDiverges(CoalgebraError):
    pass


class DecodeError(CoalgebraError):
    pass


class EnumerationTooLarge(CoalgebraError):
    pass


class ParseError(ValueError):
    """Syntax error in one of the text formats; ``pos`` is a 0-based offset
    (or line number when ``line`` is set)."""

    def __init__(self, message: str, pos: int | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if pos is not None:
            where.append(f"column {pos}" if line is not None else f"position {pos}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.pos = pos
        self.line = line


class TermTypeError(ValueError):
    """A term does not inhabit the expected functor/carrier."""
