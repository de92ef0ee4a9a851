"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class MorphlogError(Exception):
    """Base class for all errors raised by morphlog."""


class UsageError(MorphlogError):
    """Malformed user input: bad syntax, unknown names, bad specifications."""


class SemanticError(MorphlogError):
    """Input is well formed but violates an operation's precondition."""


class FormulaSyntaxError(UsageError):
    """Parse failure, carrying the 1-based column and the expected tokens."""

    def __init__(self, message: str, column: int, expected: tuple[str, ...] = ()):
        self.column = column
        self.expected = tuple(expected)
        detail = f" (expected {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"column {column}: {message}{detail}")


class UnknownAtom(UsageError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"atom {name!r} is not in the alphabet")


class InvalidAlphabet(UsageError):
    pass


class InvalidStructuringElement(UsageError):
    pass


class ScaleExceeded(UsageError):
    pass


class EmptyInput(SemanticError):
    pass


class EmptyBelief(SemanticError):
    pass


class EmptyProfile(SemanticError):
    pass


class EmptyConstraint(SemanticError):
    pass


class SharedVariables(SemanticError):
    pass


class InconsistentObservation(SemanticError):
    pass


class InconsistentExplanans(SemanticError):
    pass


class EmptyObservation(SemanticError):
    pass


class EmptyExplanans(SemanticError):
    pass
