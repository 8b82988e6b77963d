from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Union

from .syntax.ast import Type
from .syntax.pretty import pretty_type


@dataclass(frozen=True)
class TermBinding:
    name: str
    type: Type


@dataclass(frozen=True)
class TypeVarBinding:
    name: str
    level: int


Entry = Union[TermBinding, TypeVarBinding]


@dataclass(frozen=True)
class Context:
    """Immutable typing context; the newest binding shadows older ones."""

    entries: tuple[Entry, ...] = ()

    @classmethod
    def of(cls, **bindings: Type) -> Context:
        return cls(tuple(TermBinding(k, v) for k, v in bindings.items()))

    def bind(self, name: str, ty: Type) -> Context:
        return Context(self.entries + (TermBinding(name, ty),))

    def bind_tvar(self, name: str, level: int) -> Context:
        return Context(self.entries + (TypeVarBinding(name, level),))

    def lookup(self, name: str) -> Optional[Type]:
        for e in reversed(self.entries):
            if isinstance(e, TermBinding) and e.name == name:
                return e.type
        return None

    def lookup_tvar(self, name: str) -> Optional[int]:
        for e in reversed(self.entries):
            if isinstance(e, TypeVarBinding) and e.name == name:
                return e.level
        return None

    def type_vars_only(self) -> Context:
        return Context(tuple(e for e in self.entries if isinstance(e, TypeVarBinding)))

    def term_bindings(self) -> Iterator[TermBinding]:
        """Visible term bindings, innermost first, shadowed ones skipped."""
        seen = set()
        for e in reversed(self.entries):
            if isinstance(e, TermBinding) and e.name not in seen:
                seen.add(e.name)
                yield e

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        if not self.entries:
            return "."
        parts = []
        for e in self.entries:
            if isinstance(e, TermBinding):
                parts.append(f"{e.name} : {pretty_type(e.type)}")
            else:
                parts.append(f"{e.name} : Type {e.level}")
        return ", ".join(parts)


EMPTY = Context()
