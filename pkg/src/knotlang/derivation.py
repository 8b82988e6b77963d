from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .context import Context
from .syntax.ast import Term, Type
from .syntax.pretty import pretty, pretty_type

FG = "fg"
Sort = Union[int, str]  # a universe level, or FG


def show_sort(s: Sort) -> str:
    return "fg" if s == FG else f"Type {s}"


@dataclass
class Derivation:
    """One node of a typing or sorting derivation.

    Typing judgments ``ctx |- term : type (:: sort)`` have ``type`` set;
    sorting judgments ``ctx |- type :: sort`` have ``type`` None and a type
    as their subject.
    """

    rule: str
    ctx: Context
    subject: Union[Term, Type]
    type: Optional[Type] = None
    sort: Optional[Sort] = None
    premises: list[Derivation] = field(default_factory=list)

    def judgment(self) -> str:
        s = f"{self.ctx} |- {pretty(self.subject)}"
        if self.type is not None:
            s += f" : {pretty_type(self.type)}"
        if self.sort is not None:
            s += f" :: {show_sort(self.sort)}"
        return s

    def render(self, indent: str = "  ") -> str:
        """Indented text, one judgment per line, rule name in brackets."""
        lines: list[str] = []

        def go(d: Derivation, depth: int) -> None:
            lines.append(f"{indent * depth}[{d.rule}] {d.judgment()}")
            for p in d.premises:
                go(p, depth + 1)

        go(self, 0)
        return "\n".join(lines)

    def walk(self) -> Iterator[Derivation]:
        stack = [self]
        while stack:
            d = stack.pop()
            yield d
            stack.extend(reversed(d.premises))

    def __str__(self) -> str:
        return self.render()
