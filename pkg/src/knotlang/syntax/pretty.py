"""Pretty-printing.  Output always re-parses to the same tree."""

from __future__ import annotations

from .ast import (
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
)

# term precedences
_TERM, _ASSIGN, _APP, _ATOM = range(4)


def _boxed(t: Type) -> int:
    return 1 if isinstance(t, (Arrow, Exists)) else 0


def pretty_type(t: Type, prec: int = 0) -> str:
    match t:
        case Nat():
            return "Nat"
        case UnitT():
            return "Unit"
        case TVar(name=n):
            return n
        case Ref(content=c):
            return f"Ref {pretty_type(c, 1)}"
        case Product(left=a, right=b):
            return f"<{pretty_type(a, _boxed(a))} x {pretty_type(b, _boxed(b))}>"
        case Arrow(dom=a, cod=b, level=j):
            arrow = "->" if j is None else f"->[{j}]"
            s = f"{pretty_type(a, 1)} {arrow} {pretty_type(b)}"
        case Exists(var=v, level=j, body=b):
            s = f"exists {v} : Type {j} . {pretty_type(b)}"
        case _:
            raise TypeError(f"not a type: {t!r}")
    return f"({s})" if prec > 0 else s


def _term(e: Term, prec: int, spine: bool = False) -> str:
    sep = "\n" if spine else " "
    match e:
        case Var(name=n):
            return n
        case Lit(value=v):
            return str(v)
        case UnitV():
            return "unit"
        case New(init=a):
            return f"new {_term(a, _ATOM)}"
        case Deref(ref=a):
            return f"!{_term(a, _ATOM)}"
        case Proj(index=i, tuple=a):
            return f"proj{i} {_term(a, _ATOM)}"
        case Pair(left=a, right=b):
            return f"<{_term(a, _TERM)}, {_term(b, _TERM)}>"
        case Pack(witness=w, payload=p, type=t):
            return f"pack <{pretty_type(w)}, {_term(p, _TERM)}> as {pretty_type(t)}"
        case App(fn=f, arg=a):
            s, need = f"{_operand(f, _APP)} {_operand(a, _ATOM)}", _APP
        case Assign(ref=r, value=v):
            s, need = f"{_term(r, _APP)} := {_term(v, _APP)}", _ASSIGN
        case Seq(first=a, second=b):
            s, need = f"{_term(a, _ASSIGN)};{sep}{_term(b, _TERM, spine)}", _TERM
        case Let(name=x, bound=b, body=body):
            s, need = f"let {x} = {_term(b, _TERM)} in{sep}{_term(body, _TERM, spine)}", _TERM
        case Unpack(tvar=a, var=x, package=p, body=body):
            s, need = f"unpack <{a}, {x}> = {_term(p, _TERM)} in{sep}{_term(body, _TERM, spine)}", _TERM
        case Lam(param=x, param_type=t, body=body, level=j):
            ann = "" if j is None else f"[{j}] "
            s, need = f"lam {ann}{x} : {pretty_type(t)} . {_term(body, _TERM)}", _TERM
        case Code(params=params, body=body):
            binders = " ".join(f"lam {x} : {pretty_type(t)} ." for x, t in params)
            inner = _term(body, _ATOM if isinstance(body, Code) else _TERM)
            s, need = f"{binders} {inner}", _TERM
        case _:
            raise TypeError(f"not a term: {e!r}")
    return f"({s})" if prec > need else s


def _operand(e: Term, prec: int) -> str:
    # prefix forms are atoms, but `proj1 p x` reads badly
    if isinstance(e, (New, Deref, Proj)):
        return f"({_term(e, _TERM)})"
    return _term(e, prec)


def pretty(node, multiline: bool = False) -> str:
    """Render a term or a type as concrete syntax.

    With ``multiline`` the outer ``let``/``;``/``unpack`` spine is broken
    one binding per line, which is the layout used for compiler output.
    """
    if isinstance(node, (Nat, UnitT, TVar, Ref, Product, Arrow, Exists)):
        return pretty_type(node)
    return _term(node, _TERM, spine=multiline)
