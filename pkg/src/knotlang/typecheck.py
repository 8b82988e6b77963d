"""Type checker for the source language under three disciplines.

``UNRESTRICTED`` is plain simply typed lambda calculus with references.
``FULL_GROUND`` additionally requires every variable captured by a lambda to
have a full-ground type.  ``SORTED`` gives each lambda the level of the
highest-level variable it captures and compares arrow levels exactly, so a
closure that captures ``Ref (A ->[0] B)`` is ``A ->[1] B`` and cannot be
stored back into that reference.
"""

from __future__ import annotations

import enum
import warnings

from .context import EMPTY, Context
from .derivation import FG, Derivation
from .errors import ErrorKind, SortError, TypingError
from .sorts import is_full_ground, sort_of_source
from .syntax.ast import (
    NAT,
    TARGET_ONLY,
    UNIT_T,
    App,
    Arrow,
    Assign,
    Deref,
    Lam,
    Let,
    Lit,
    New,
    Pair,
    Product,
    Proj,
    Ref,
    Seq,
    Term,
    Type,
    UnitT,
    UnitV,
    Var,
    default_levels,
    erase_levels,
    is_target_term,
    type_children,
)
from .syntax.pretty import pretty_type
from .syntax.scope import free_vars


class Mode(enum.Enum):
    UNRESTRICTED = "unrestricted"
    FULL_GROUND = "full-ground"
    SORTED = "sorted"

    @classmethod
    def parse(cls, name: str) -> Mode:
        return cls(name.lower().replace("_", "-"))


class ArrowLevelDefaulted(UserWarning):
    """An arrow written without ``->[j]`` was given level 0."""


def has_unleveled_arrow(t: Type) -> bool:
    if isinstance(t, Arrow) and t.level is None:
        return True
    return any(has_unleveled_arrow(c) for c in type_children(t))


def check_equal(mode: Mode, expected: Type, found: Type, term: Term, loc=None) -> None:
    """Raise unless the two source types are identical.

    In sorted mode a difference confined to arrow levels is a SortMismatch.
    """
    if expected == found:
        return
    if mode is Mode.SORTED and (has_unleveled_arrow(expected) or has_unleveled_arrow(found)):
        raise TypingError(ErrorKind.UnannotatedArrow, term, pretty_type(expected), pretty_type(found), loc)
    kind = ErrorKind.Mismatch
    if mode is Mode.SORTED and erase_levels(expected) == erase_levels(found):
        kind = ErrorKind.SortMismatch
    raise TypingError(kind, term, pretty_type(expected), pretty_type(found), loc)


class SourceChecker:
    def __init__(self, mode: Mode, warn: bool = True):
        self.mode = mode
        self.warn = warn

    def norm(self, t: Type) -> Type:
        if self.mode is not Mode.SORTED:
            return erase_levels(t)
        t2, defaulted = default_levels(t)
        if defaulted and self.warn:
            warnings.warn(
                f"arrow without level in {pretty_type(t)} defaults to level 0",
                ArrowLevelDefaulted,
                stacklevel=4,
            )
        return t2

    def level(self, ctx: Context, t: Type, term: Term) -> int:
        try:
            return sort_of_source(ctx, t)
        except SortError:
            raise TypingError(ErrorKind.UnannotatedArrow, term, "leveled arrow", pretty_type(t)) from None

    def node(self, rule: str, ctx: Context, e: Term, ty: Type, premises=()) -> Derivation:
        sort = None
        if self.mode is Mode.SORTED:
            try:
                sort = sort_of_source(ctx, ty)
            except SortError:
                pass
        return Derivation(rule, ctx, e, ty, sort, list(premises))

    def lookup(self, ctx: Context, name: str, e: Term) -> Type:
        ty = ctx.lookup(name)
        if ty is None:
            raise TypingError(ErrorKind.UnboundVariable, e, "bound variable", name)
        return ty if self.mode is Mode.SORTED else erase_levels(ty)

    def check(self, ctx: Context, e: Term) -> Derivation:
        match e:
            case Var(name=n):
                return self.node("Var", ctx, e, self.lookup(ctx, n, e))
            case Lit():
                return self.node("Nat", ctx, e, NAT)
            case UnitV():
                return self.node("Unit", ctx, e, UNIT_T)
            case Lam():
                return self.lam(ctx, e)
            case App(fn=f, arg=a):
                df = self.check(ctx, f)
                if not isinstance(df.type, Arrow):
                    raise TypingError(ErrorKind.NotAFunction, f, "function type", pretty_type(df.type))
                da = self.check(ctx, a)
                check_equal(self.mode, df.type.dom, da.type, a)
                return self.node("App", ctx, e, df.type.cod, [df, da])
            case New(init=a):
                d = self.check(ctx, a)
                return self.node("New", ctx, e, Ref(d.type), [d])
            case Deref(ref=r):
                d = self.check(ctx, r)
                if not isinstance(d.type, Ref):
                    raise TypingError(ErrorKind.NotARef, r, "reference type", pretty_type(d.type))
                return self.node("Deref", ctx, e, d.type.content, [d])
            case Assign(ref=r, value=v):
                dr = self.check(ctx, r)
                if not isinstance(dr.type, Ref):
                    raise TypingError(ErrorKind.NotARef, r, "reference type", pretty_type(dr.type))
                dv = self.check(ctx, v)
                check_equal(self.mode, dr.type.content, dv.type, e)
                return self.node("Assign", ctx, e, UNIT_T, [dr, dv])
            case Seq(first=a, second=b):
                da = self.check(ctx, a)
                if not isinstance(da.type, UnitT):
                    raise TypingError(ErrorKind.Mismatch, a, "Unit", pretty_type(da.type))
                db = self.check(ctx, b)
                return self.node("Seq", ctx, e, db.type, [da, db])
            case Let(name=x, bound=b, body=body):
                db = self.check(ctx, b)
                dbody = self.check(ctx.bind(x, db.type), body)
                return self.node("Let", ctx, e, dbody.type, [db, dbody])
            case Pair(left=a, right=b):
                da, db = self.check(ctx, a), self.check(ctx, b)
                return self.node("Pair", ctx, e, Product(da.type, db.type), [da, db])
            case Proj(index=i, tuple=t):
                d = self.check(ctx, t)
                if not isinstance(d.type, Product):
                    raise TypingError(ErrorKind.NotAProduct, t, "product type", pretty_type(d.type))
                return self.node(f"Proj{i}", ctx, e, d.type.left if i == 1 else d.type.right, [d])
            case _ if isinstance(e, TARGET_ONLY):
                raise TypingError(ErrorKind.Mismatch, e, "source-language term", type(e).__name__.lower())
        raise TypeError(f"not a term: {e!r}")

    def lam(self, ctx: Context, e: Lam) -> Derivation:
        captures = []
        levels = []
        for v in free_vars(e):
            if ctx.lookup(v) is None:
                continue  # reported at the variable itself
            ty = self.lookup(ctx, v, e)
            if self.mode is Mode.FULL_GROUND:
                if not is_full_ground(ty):
                    raise TypingError(
                        ErrorKind.NonFullGroundCapture, e, f"full-ground type for captured {v}", pretty_type(ty)
                    )
                captures.append(Derivation("Capture", ctx, Var(v), ty, FG))
            elif self.mode is Mode.SORTED:
                j = self.level(ctx, ty, e)
                levels.append(j)
                captures.append(Derivation("Capture", ctx, Var(v), ty, j))
        dom = self.norm(e.param_type)
        dbody = self.check(ctx.bind(e.param, dom), e.body)
        if self.mode is not Mode.SORTED:
            return self.node("Lam", ctx, e, Arrow(dom, dbody.type), captures + [dbody])
        j = max(levels, default=0)
        ty = Arrow(dom, dbody.type, j)
        if e.level is not None and e.level != j:
            raise TypingError(
                ErrorKind.SortMismatch, e, pretty_type(Arrow(dom, dbody.type, e.level)), pretty_type(ty)
            )
        return self.node("Lam", ctx, e, ty, captures + [dbody])


def check_source(ctx: Context, e: Term, mode: Mode) -> Derivation:
    return SourceChecker(mode).check(ctx, e)


def typecheck_source(ctx: Context, e: Term, mode: Mode) -> Type:
    """Type of ``e`` under ``mode``; raises :class:`TypingError`."""
    return check_source(ctx, e, mode).type


def explain(e: Term, mode: Mode, ctx: Context = EMPTY) -> Derivation:
    """Full derivation tree for ``e``.  Target programs use the target rules."""
    if is_target_term(e):
        from .cconv import check_target

        return check_target(ctx, e, mode)
    return check_source(ctx, e, mode)
