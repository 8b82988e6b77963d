"""Abstract syntax shared by the source and target languages.

The target language is a superset of the source: it adds packages,
``unpack`` and closed code.  Terms carry an optional source location that
is ignored by structural equality, so a parsed term compares equal to one
built by hand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class Loc:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


def _loc() -> Optional[Loc]:
    return field(default=None, compare=False, repr=False)


# --- types -----------------------------------------------------------------


@dataclass(frozen=True)
class Nat:
    pass


@dataclass(frozen=True)
class UnitT:
    pass


@dataclass(frozen=True)
class Arrow:
    """Function type.  ``level`` is the universe level of the closure.

    In the target language arrows are code types and the level is unused.
    """

    dom: Type
    cod: Type
    level: Optional[int] = None


@dataclass(frozen=True)
class Ref:
    content: Type


@dataclass(frozen=True)
class Product:
    left: Type
    right: Type


@dataclass(frozen=True)
class Exists:
    var: str
    level: int
    body: Type


@dataclass(frozen=True)
class TVar:
    name: str


Type = Union[Nat, UnitT, Arrow, Ref, Product, Exists, TVar]

NAT = Nat()
UNIT_T = UnitT()


# --- terms -----------------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Lit:
    value: int
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class UnitV:
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Lam:
    param: str
    param_type: Type
    body: Term
    level: Optional[int] = None
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class App:
    fn: Term
    arg: Term
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class New:
    init: Term
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Deref:
    ref: Term
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Assign:
    ref: Term
    value: Term
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Seq:
    first: Term
    second: Term
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Let:
    name: str
    bound: Term
    body: Term
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Pair:
    left: Term
    right: Term
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Proj:
    index: int
    tuple: Term
    loc: Optional[Loc] = _loc()

    def __post_init__(self) -> None:
        if self.index not in (1, 2):
            raise ValueError(f"projection index must be 1 or 2, got {self.index}")


# target-only forms


@dataclass(frozen=True)
class Pack:
    witness: Type
    payload: Term
    type: Exists
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Unpack:
    tvar: str
    var: str
    package: Term
    body: Term
    loc: Optional[Loc] = _loc()


@dataclass(frozen=True)
class Code:
    """Closed multi-parameter code; ``lam x:A. lam env:B. e`` in target syntax."""

    params: tuple[tuple[str, Type], ...]
    body: Term
    loc: Optional[Loc] = _loc()


Term = Union[Var, Lit, UnitV, Lam, App, New, Deref, Assign, Seq, Let, Pair, Proj, Pack, Unpack, Code]

TARGET_ONLY = (Pack, Unpack, Code)


def is_target_term(e: Term) -> bool:
    """True if ``e`` contains any target-only construct."""
    return any(isinstance(t, TARGET_ONLY) for t in subterms(e))


def children(e: Term) -> tuple[Term, ...]:
    match e:
        case Var() | Lit() | UnitV():
            return ()
        case Lam(body=b) | Code(body=b) | New(init=b) | Deref(ref=b) | Proj(tuple=b):
            return (b,)
        case Pack(payload=p):
            return (p,)
        case App(fn=a, arg=b) | Assign(ref=a, value=b) | Seq(first=a, second=b) | Pair(left=a, right=b):
            return (a, b)
        case Let(bound=a, body=b) | Unpack(package=a, body=b):
            return (a, b)
    raise TypeError(f"not a term: {e!r}")


def subterms(e: Term):
    """Pre-order iterator over ``e`` and all of its subterms."""
    stack = [e]
    while stack:
        t = stack.pop()
        yield t
        stack.extend(reversed(children(t)))


def type_children(t: Type) -> tuple[Type, ...]:
    match t:
        case Arrow(dom=a, cod=b) | Product(left=a, right=b):
            return (a, b)
        case Ref(content=a) | Exists(body=a):
            return (a,)
    return ()


def erase_levels(t: Type) -> Type:
    """Forget arrow levels and existential sort annotations."""
    match t:
        case Arrow(dom=a, cod=b):
            return Arrow(erase_levels(a), erase_levels(b))
        case Ref(content=a):
            return Ref(erase_levels(a))
        case Product(left=a, right=b):
            return Product(erase_levels(a), erase_levels(b))
        case Exists(var=v, body=b):
            return Exists(v, 0, erase_levels(b))
    return t


def default_levels(t: Type, level: int = 0) -> tuple[Type, bool]:
    """Fill missing arrow levels with ``level``; report whether any were missing."""
    match t:
        case Arrow(dom=a, cod=b, level=j):
            a2, ma = default_levels(a, level)
            b2, mb = default_levels(b, level)
            return Arrow(a2, b2, level if j is None else j), ma or mb or j is None
        case Ref(content=a):
            a2, m = default_levels(a, level)
            return Ref(a2), m
        case Product(left=a, right=b):
            a2, ma = default_levels(a, level)
            b2, mb = default_levels(b, level)
            return Product(a2, b2), ma or mb
        case Exists(var=v, level=j, body=b):
            b2, m = default_levels(b, level)
            return Exists(v, j, b2), m
    return t, False


def free_type_vars(t: Type) -> set[str]:
    match t:
        case TVar(name=n):
            return {n}
        case Exists(var=v, body=b):
            return free_type_vars(b) - {v}
    out: set[str] = set()
    for c in type_children(t):
        out |= free_type_vars(c)
    return out


def alpha_equal(a: Type, b: Type) -> bool:
    """Structural type equality up to renaming of existential binders."""

    def go(a: Type, b: Type, env: list[tuple[str, str]]) -> bool:
        match a, b:
            case TVar(name=x), TVar(name=y):
                for l, r in reversed(env):
                    if l == x or r == y:
                        return l == x and r == y
                return x == y
            case Exists(var=x, level=i, body=p), Exists(var=y, level=j, body=q):
                return i == j and go(p, q, env + [(x, y)])
            case Arrow(dom=a1, cod=a2, level=i), Arrow(dom=b1, cod=b2, level=j):
                return i == j and go(a1, b1, env) and go(a2, b2, env)
            case Product(left=a1, right=a2), Product(left=b1, right=b2):
                return go(a1, b1, env) and go(a2, b2, env)
            case Ref(content=p), Ref(content=q):
                return go(p, q, env)
            case (Nat(), Nat()) | (UnitT(), UnitT()):
                return True
        return False

    return go(a, b, [])
