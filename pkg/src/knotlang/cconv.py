"""Typed closure conversion and the target-language type checker.

A source lambda becomes a package hiding its environment type::

    lam x:A. e   ~~>   pack <E, <code, env-tuple>> as exists a : Type j . <(A -> a -> B) x a>

where ``E`` is a right-nested, Unit-terminated product of the captured
variables' types (lexicographic order) and ``code`` is closed two-parameter
code that rebinds each captured variable from its environment parameter.
Application opens the package::

    f a   ~~>   unpack <a0, p0> = f in (proj1 p0) a (proj2 p0)
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .context import EMPTY, Context
from .derivation import Derivation
from .errors import ErrorKind, SortError, TypingError
from .sorts import full_ground_derivation, is_full_ground, sort_derivation, sort_of_target
from .syntax.ast import (
    NAT,
    UNIT_T,
    App,
    Arrow,
    Assign,
    Code,
    Deref,
    Exists,
    Lam,
    Let,
    Lit,
    Nat,
    New,
    Pack,
    Pair,
    Product,
    Proj,
    Ref,
    Seq,
    Term,
    TVar,
    Type,
    UnitT,
    UnitV,
    Unpack,
    Var,
    alpha_equal,
    erase_levels,
    free_type_vars,
)
from .syntax.pretty import pretty_type
from .syntax.scope import all_names, free_vars
from .typecheck import Mode, SourceChecker

# bound variable of every converted closure type
CLOSURE_TVAR = "a"


def convert_type(t: Type, mode: Mode) -> Type:
    """Translate a source type; arrows become existential closure types."""
    match t:
        case Arrow(dom=a, cod=b, level=j):
            if mode is Mode.SORTED:
                if j is None:
                    raise SortError(f"arrow needs a level in sorted mode: {pretty_type(t)}")
            else:
                j = 0
            alpha = TVar(CLOSURE_TVAR)
            code = Arrow(convert_type(a, mode), Arrow(alpha, convert_type(b, mode)))
            return Exists(CLOSURE_TVAR, j, Product(code, alpha))
        case Ref(content=a):
            return Ref(convert_type(a, mode))
        case Product(left=a, right=b):
            return Product(convert_type(a, mode), convert_type(b, mode))
        case Nat() | UnitT():
            return t
    raise TypeError(f"not a source type: {t!r}")


def subst_type(body: Type, witness: Type, var: str) -> Type:
    """Capture-avoiding ``body[witness/var]``."""
    match body:
        case TVar(name=n):
            return witness if n == var else body
        case Exists(var=v, level=j, body=b):
            if v == var:
                return body
            if v in free_type_vars(witness):
                avoid = free_type_vars(witness) | free_type_vars(b) | {var}
                fresh = next(f"{v}{i}" for i in itertools.count(1) if f"{v}{i}" not in avoid)
                b, v = subst_type(b, TVar(fresh), v), fresh
            return Exists(v, j, subst_type(b, witness, var))
        case Arrow(dom=a, cod=b, level=j):
            return Arrow(subst_type(a, witness, var), subst_type(b, witness, var), j)
        case Ref(content=a):
            return Ref(subst_type(a, witness, var))
        case Product(left=a, right=b):
            return Product(subst_type(a, witness, var), subst_type(b, witness, var))
    return body


# --- closure conversion --------------------------------------------------------


@dataclass(frozen=True)
class ClosureLayout:
    captured: tuple[tuple[str, Type], ...]  # source types, lexicographic by name
    env_type: Type  # target type
    level: int

    def env_tuple(self, loc=None) -> Term:
        e: Term = UnitV(loc=loc)
        for name, _ in reversed(self.captured):
            e = Pair(Var(name, loc=loc), e, loc=loc)
        return e


def closure_layout(ctx: Context, lam: Lam, mode: Mode) -> ClosureLayout:
    checker = SourceChecker(mode, warn=False)
    captured = []
    for v in free_vars(lam):
        ty = ctx.lookup(v)
        if ty is None:
            raise TypingError(ErrorKind.UnboundVariable, lam, "bound variable", v)
        captured.append((v, ty if mode is Mode.SORTED else erase_levels(ty)))
    env: Type = UNIT_T
    for _, ty in reversed(captured):
        env = Product(convert_type(ty, mode), env)
    level = 0
    if mode is Mode.SORTED:
        level = max((checker.level(ctx, ty, lam) for _, ty in captured), default=0)
    return ClosureLayout(tuple(captured), env, level)


class _Converter:
    def __init__(self, program: Term, mode: Mode):
        self.mode = mode
        self.checker = SourceChecker(mode, warn=False)
        self.used = set(all_names(program))
        self.counters: dict[str, itertools.count] = {}

    def fresh(self, prefix: str) -> str:
        counter = self.counters.setdefault(prefix, itertools.count())
        while True:
            name = f"{prefix}{next(counter)}"
            if name not in self.used:
                self.used.add(name)
                return name

    def conv(self, ctx: Context, e: Term) -> tuple[Term, Type]:
        """Converted term and the (synthesized) source type of ``e``."""
        loc = e.loc
        match e:
            case Var(name=n):
                return e, self.checker.lookup(ctx, n, e)
            case Lit():
                return e, NAT
            case UnitV():
                return e, UNIT_T
            case Lam():
                return self.lam(ctx, e)
            case App(fn=f, arg=a):
                f2, fty = self.conv(ctx, f)
                a2, _ = self.conv(ctx, a)
                if not isinstance(fty, Arrow):
                    raise TypingError(ErrorKind.NotAFunction, f, "function type", pretty_type(fty))
                tv, p = self.fresh("a"), self.fresh("p")
                call = App(App(Proj(1, Var(p, loc=loc), loc=loc), a2, loc=loc), Proj(2, Var(p, loc=loc), loc=loc), loc=loc)
                return Unpack(tv, p, f2, call, loc=loc), fty.cod
            case New(init=a):
                a2, t = self.conv(ctx, a)
                return New(a2, loc=loc), Ref(t)
            case Deref(ref=r):
                r2, t = self.conv(ctx, r)
                if not isinstance(t, Ref):
                    raise TypingError(ErrorKind.NotARef, r, "reference type", pretty_type(t))
                return Deref(r2, loc=loc), t.content
            case Assign(ref=r, value=v):
                r2, _ = self.conv(ctx, r)
                v2, _ = self.conv(ctx, v)
                return Assign(r2, v2, loc=loc), UNIT_T
            case Seq(first=a, second=b):
                a2, _ = self.conv(ctx, a)
                b2, t = self.conv(ctx, b)
                return Seq(a2, b2, loc=loc), t
            case Let(name=x, bound=b, body=body):
                b2, bt = self.conv(ctx, b)
                body2, t = self.conv(ctx.bind(x, bt), body)
                return Let(x, b2, body2, loc=loc), t
            case Pair(left=a, right=b):
                (a2, at), (b2, bt) = self.conv(ctx, a), self.conv(ctx, b)
                return Pair(a2, b2, loc=loc), Product(at, bt)
            case Proj(index=i, tuple=t):
                t2, ty = self.conv(ctx, t)
                if not isinstance(ty, Product):
                    raise TypingError(ErrorKind.NotAProduct, t, "product type", pretty_type(ty))
                return Proj(i, t2, loc=loc), ty.left if i == 1 else ty.right
        raise TypeError(f"not a source term: {e!r}")

    def lam(self, ctx: Context, e: Lam) -> tuple[Term, Type]:
        loc = e.loc
        layout = closure_layout(ctx, e, self.mode)
        dom = self.checker.norm(e.param_type)
        body, cod = self.conv(ctx.bind(e.param, dom), e.body)

        taken = {e.param} | {v for v, _ in layout.captured}
        env = next(n for n in itertools.chain(["env"], (f"env{i}" for i in itertools.count(1))) if n not in taken)
        path: Term = Var(env, loc=loc)
        bindings = []
        for v, _ in layout.captured:
            bindings.append((v, Proj(1, path, loc=loc)))
            path = Proj(2, path, loc=loc)
        for v, proj in reversed(bindings):
            body = Let(v, proj, body, loc=loc)

        code = Code(((e.param, convert_type(dom, self.mode)), (env, layout.env_type)), body, loc=loc)
        src_type = Arrow(dom, cod, layout.level if self.mode is Mode.SORTED else None)
        pkg = Pack(layout.env_type, Pair(code, layout.env_tuple(loc), loc=loc), convert_type(src_type, self.mode), loc=loc)
        return pkg, src_type


def closure_convert(e: Term, mode: Mode, ctx: Context = EMPTY) -> Term:
    """Closure-convert a source program.

    ``ctx`` types the program's free variables (source types).  The
    program is expected to type check in ``mode``; ill-typed input is still
    translated where the shape allows, so the target checker can report the
    failure on the converted program.
    """
    return _Converter(e, mode).conv(ctx, e)[0]


def convert_context(ctx: Context, mode: Mode) -> Context:
    out = EMPTY
    for entry in ctx.entries:
        if hasattr(entry, "type"):
            out = out.bind(entry.name, convert_type(entry.type, mode))
        else:
            out = out.bind_tvar(entry.name, entry.level)
    return out


# --- target type checker -----------------------------------------------------------


class TargetChecker:
    def __init__(self, mode: Mode):
        self.mode = mode

    def same(self, a: Type, b: Type) -> bool:
        if self.mode is Mode.SORTED:
            return alpha_equal(a, b)
        return alpha_equal(erase_levels(a), erase_levels(b))

    def check_equal(self, expected: Type, found: Type, term: Term) -> None:
        if self.same(expected, found):
            return
        kind = ErrorKind.Mismatch
        if self.mode is Mode.SORTED and alpha_equal(erase_levels(expected), erase_levels(found)):
            kind = ErrorKind.SortMismatch
        raise TypingError(kind, term, pretty_type(expected), pretty_type(found))

    def well_scoped(self, ctx: Context, t: Type, term: Term) -> None:
        for n in sorted(free_type_vars(t)):
            if ctx.lookup_tvar(n) is None:
                raise TypingError(ErrorKind.UnboundVariable, term, "bound type variable", n)

    def node(self, rule: str, ctx: Context, e: Term, ty: Type, premises=()) -> Derivation:
        sort = None
        if self.mode is Mode.SORTED:
            try:
                sort = sort_of_target(ctx, ty)
            except SortError:
                pass
        return Derivation(rule, ctx, e, ty, sort, list(premises))

    def check(self, ctx: Context, e: Term) -> Derivation:
        match e:
            case Var(name=n):
                ty = ctx.lookup(n)
                if ty is None:
                    raise TypingError(ErrorKind.UnboundVariable, e, "bound variable", n)
                return self.node("Var", ctx, e, ty)
            case Lit():
                return self.node("Nat", ctx, e, NAT)
            case UnitV():
                return self.node("Unit", ctx, e, UNIT_T)
            case Code():
                return self.code(ctx, e)
            case Pack():
                return self.pack(ctx, e)
            case Unpack():
                return self.unpack(ctx, e)
            case App(fn=f, arg=a):
                df = self.check(ctx, f)
                if not isinstance(df.type, Arrow):
                    raise TypingError(ErrorKind.NotAFunction, f, "code type", pretty_type(df.type))
                da = self.check(ctx, a)
                self.check_equal(df.type.dom, da.type, a)
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
                self.check_equal(dr.type.content, dv.type, e)
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
            case Lam():
                raise TypingError(ErrorKind.Mismatch, e, "target-language term", "source lambda")
        raise TypeError(f"not a term: {e!r}")

    def code(self, ctx: Context, e: Code) -> Derivation:
        outer = free_vars(e)
        if outer:
            raise TypingError(ErrorKind.ClosednessViolation, e, "closed code", f"reference to {', '.join(outer)}")
        inner = ctx.type_vars_only()
        for name, ty in e.params:
            self.well_scoped(ctx, ty, e)
            inner = inner.bind(name, ty)
        dbody = self.check(inner, e.body)
        ty = dbody.type
        for _, pty in reversed(e.params):
            ty = Arrow(pty, ty)
        return self.node("Code", ctx, e, ty, [dbody])

    def pack(self, ctx: Context, e: Pack) -> Derivation:
        ex = e.type
        self.well_scoped(ctx, e.witness, e)
        self.well_scoped(ctx, ex, e)
        premises = []
        if self.mode is Mode.FULL_GROUND:
            if not is_full_ground(e.witness):
                raise TypingError(ErrorKind.NonFullGroundCapture, e, "full-ground witness", pretty_type(e.witness))
            premises.append(full_ground_derivation(ctx, e.witness))
        elif self.mode is Mode.SORTED:
            dw = sort_derivation(ctx, e.witness)
            if dw.sort != ex.level:
                raise TypingError(ErrorKind.SortMismatch, e, f"witness of sort Type {ex.level}", f"Type {dw.sort}")
            premises.append(dw)
        dp = self.check(ctx, e.payload)
        self.check_equal(subst_type(ex.body, e.witness, ex.var), dp.type, e.payload)
        premises.append(dp)
        return self.node("Pack", ctx, e, ex, premises)

    def unpack(self, ctx: Context, e: Unpack) -> Derivation:
        dp = self.check(ctx, e.package)
        ex = dp.type
        if not isinstance(ex, Exists):
            raise TypingError(ErrorKind.Mismatch, e.package, "existential type", pretty_type(ex))
        if ctx.lookup_tvar(e.tvar) is not None:
            raise TypingError(ErrorKind.Mismatch, e, "fresh type variable", e.tvar)
        opened = subst_type(ex.body, TVar(e.tvar), ex.var)
        dbody = self.check(ctx.bind_tvar(e.tvar, ex.level).bind(e.var, opened), e.body)
        if e.tvar in free_type_vars(dbody.type):
            raise TypingError(ErrorKind.Mismatch, e, f"type not mentioning {e.tvar}", pretty_type(dbody.type))
        return self.node("Unpack", ctx, e, dbody.type, [dp, dbody])


def check_target(ctx: Context, e: Term, mode: Mode) -> Derivation:
    return TargetChecker(mode).check(ctx, e)


def typecheck_target(ctx: Context, e: Term, mode: Mode) -> Type:
    """Type of a target program under ``mode``; raises :class:`TypingError`."""
    return check_target(ctx, e, mode).type

