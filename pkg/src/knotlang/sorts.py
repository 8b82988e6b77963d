"""Universe sorts of types.

Two classifications are provided: the boolean full-ground test used by the
full-ground discipline, and the ``Type j`` level used by the sorted
discipline, where ``Ref A`` sits exactly one level above ``A``.
"""

from __future__ import annotations

import contextlib

from .context import Context
from .derivation import FG, Derivation
from .errors import SortError
from .syntax.ast import Arrow, Exists, Nat, Product, Ref, TVar, Type, UnitT
from .syntax.pretty import pretty_type

_ref_bump = 1


@contextlib.contextmanager
def _ref_bump_disabled():
    """Test hook: make ``Ref A`` live at the same level as ``A``.

    Mutates module state; not for use outside the test suite.
    """
    global _ref_bump
    saved, _ref_bump = _ref_bump, 0
    try:
        yield
    finally:
        _ref_bump = saved


def is_full_ground(t: Type) -> bool:
    """Nat, Unit, products of full-ground types and references to them."""
    match t:
        case Nat() | UnitT():
            return True
        case Ref(content=a):
            return is_full_ground(a)
        case Product(left=a, right=b):
            return is_full_ground(a) and is_full_ground(b)
    return False


def sort_of_source(ctx: Context, t: Type) -> int:
    match t:
        case Nat() | UnitT():
            return 0
        case Ref(content=a):
            return sort_of_source(ctx, a) + _ref_bump
        case Product(left=a, right=b):
            return max(sort_of_source(ctx, a), sort_of_source(ctx, b))
        case Arrow(level=None):
            raise SortError(f"unannotated arrow has no level: {pretty_type(t)}")
        case Arrow(level=j):
            return j
    raise SortError(f"not a source type: {pretty_type(t)}")


def sort_of_target(ctx: Context, t: Type) -> int:
    """Level of a target type.

    Code arrows (no level) are closed and sit at level 0; a leveled arrow
    is a source type embedded unchanged and keeps its level.
    """
    match t:
        case Nat() | UnitT():
            return 0
        case Ref(content=a):
            return sort_of_target(ctx, a) + _ref_bump
        case Product(left=a, right=b):
            return max(sort_of_target(ctx, a), sort_of_target(ctx, b))
        case Arrow(level=None):
            return 0
        case Arrow(level=j):
            return j
        case TVar(name=n):
            j = ctx.lookup_tvar(n)
            if j is None:
                raise SortError(f"unbound type variable {n}")
            return j
        case Exists(var=v, level=j, body=b):
            return sort_of_target(ctx.bind_tvar(v, j), b)
    raise SortError(f"not a type: {t!r}")


def sort_derivation(ctx: Context, t: Type) -> Derivation:
    """Derivation of ``ctx |- t :: Type k`` in the target sort system."""
    match t:
        case Nat():
            return Derivation("Nat", ctx, t, sort=0)
        case UnitT():
            return Derivation("Unit", ctx, t, sort=0)
        case Ref(content=a):
            d = sort_derivation(ctx, a)
            return Derivation("Ref", ctx, t, sort=d.sort + _ref_bump, premises=[d])
        case Product(left=a, right=b):
            da, db = sort_derivation(ctx, a), sort_derivation(ctx, b)
            return Derivation("Prod", ctx, t, sort=max(da.sort, db.sort), premises=[da, db])
        case Arrow(level=None):
            return Derivation("Code", ctx, t, sort=0)
        case Arrow(level=j):
            return Derivation("Arrow", ctx, t, sort=j)
        case TVar(name=n):
            j = ctx.lookup_tvar(n)
            if j is None:
                raise SortError(f"unbound type variable {n}")
            return Derivation("TVar", ctx, t, sort=j)
        case Exists(var=v, level=j, body=b):
            d = sort_derivation(ctx.bind_tvar(v, j), b)
            return Derivation("Exists", ctx, t, sort=d.sort, premises=[d])
    raise SortError(f"not a type: {t!r}")


def full_ground_derivation(ctx: Context, t: Type) -> Derivation:
    if not is_full_ground(t):
        raise SortError(f"not full-ground: {pretty_type(t)}")
    return Derivation("FullGround", ctx, t, sort=FG)
