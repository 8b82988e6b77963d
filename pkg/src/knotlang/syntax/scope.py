from __future__ import annotations

from .ast import Code, Lam, Let, Term, Unpack, Var, children


def _free(e: Term) -> set[str]:
    match e:
        case Var(name=n):
            return {n}
        case Lam(param=x, body=b):
            return _free(b) - {x}
        case Let(name=x, bound=b, body=body):
            return _free(b) | (_free(body) - {x})
        case Unpack(var=x, package=p, body=body):
            return _free(p) | (_free(body) - {x})
        case Code(params=params, body=b):
            return _free(b) - {x for x, _ in params}
    out: set[str] = set()
    for c in children(e):
        out |= _free(c)
    return out


def free_vars(e: Term) -> list[str]:
    """Free term variables of ``e``, sorted lexicographically."""
    return sorted(_free(e))


def all_names(e: Term) -> set[str]:
    """Every term-variable name occurring in ``e``, bound or free."""
    names: set[str] = set()
    stack = [e]
    while stack:
        t = stack.pop()
        match t:
            case Var(name=n):
                names.add(n)
            case Lam(param=x) | Let(name=x):
                names.add(x)
            case Unpack(tvar=a, var=x):
                names |= {a, x}
            case Code(params=params):
                names |= {x for x, _ in params}
        stack.extend(children(t))
    return names
