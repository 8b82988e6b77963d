from __future__ import annotations

import enum
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from .syntax.ast import Loc


class KnotError(Exception):
    """Base class for every error raised by knotlang."""


class ParseError(KnotError):
    def __init__(self, message: str, loc: Loc, expected: frozenset[str]):
        self.message = message
        self.loc = loc
        self.expected = expected
        super().__init__(str(self))

    def __str__(self) -> str:
        return f"{self.loc}: {self.describe()}"

    def describe(self) -> str:
        s = self.message
        if self.expected:
            s += f"; expected one of: {', '.join(sorted(self.expected))}"
        return s

    def render(self, filename: str = "<input>") -> str:
        return f"{filename}:{self.loc}: ParseError: {self.describe()}"


class SortError(KnotError):
    """A universe level was demanded of a type that has none."""


class ErrorKind(enum.Enum):
    Mismatch = "Mismatch"
    UnboundVariable = "UnboundVariable"
    NonFullGroundCapture = "NonFullGroundCapture"
    SortMismatch = "SortMismatch"
    UnannotatedArrow = "UnannotatedArrow"
    NotAFunction = "NotAFunction"
    NotARef = "NotARef"
    NotAProduct = "NotAProduct"
    ClosednessViolation = "ClosednessViolation"


class TypingError(KnotError):
    """A program was rejected by a type checker.

    ``expected`` and ``found`` are already rendered to text so the error can
    be printed without knowing which language it came from.
    """

    def __init__(self, kind: ErrorKind, term, expected: str, found: str, loc: Optional[Loc] = None):
        self.kind = kind
        self.term = term
        self.expected = expected
        self.found = found
        self.loc = loc if loc is not None else getattr(term, "loc", None)
        super().__init__(self.render())

    def render(self, filename: str = "<input>") -> str:
        line, col = (self.loc.line, self.loc.col) if self.loc else (0, 0)
        return f"{filename}:{line}:{col}: {self.kind.value}: expected {self.expected}, found {self.found}"
