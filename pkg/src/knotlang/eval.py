"""Fuel-bounded big-step evaluation with a mutable store.

Call-by-value, left to right.  Exactly these steps consume one unit of fuel:
beta reduction (and a saturated code call), dereference, assignment,
allocation, projection, ``let`` and ``unpack`` binding.  Running out of fuel
is reported as :class:`FuelExhausted`, the observable stand-in for
divergence.

The evaluator is written as big-step rules, but each rule is a generator
that yields its sub-evaluations to a driver loop, so deep or long-running
programs do not exhaust the Python stack.  Tail positions are returned as
:class:`_Tail` so a diverging loop runs in constant driver-stack space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

from .syntax.ast import (
    App,
    Assign,
    Code,
    Deref,
    Lam,
    Let,
    Lit,
    New,
    Pack,
    Pair,
    Proj,
    Seq,
    Term,
    Type,
    UnitV,
    Unpack,
    Var,
)
from .syntax.pretty import pretty

DEFAULT_FUEL = 10_000


# --- values ---------------------------------------------------------------------


@dataclass(frozen=True)
class VNat:
    value: int


@dataclass(frozen=True)
class VUnit:
    pass


@dataclass(frozen=True)
class VLoc:
    index: int


@dataclass(frozen=True)
class VClosure:
    param: str
    body: Term
    env: dict = field(compare=False)


@dataclass(frozen=True)
class VPair:
    left: Value
    right: Value


@dataclass(frozen=True)
class VPackage:
    witness: Type
    payload: Value


@dataclass(frozen=True)
class VCode:
    params: tuple
    body: Term
    args: tuple = ()


Value = Union[VNat, VUnit, VLoc, VClosure, VPair, VPackage, VCode]
UNIT = VUnit()


def show_value(v: Value) -> str:
    match v:
        case VNat(value=n):
            return str(n)
        case VUnit():
            return "unit"
        case VLoc(index=i):
            return f"<loc {i}>"
        case VPair(left=a, right=b):
            return f"<{show_value(a)}, {show_value(b)}>"
        case VClosure():
            return "<closure>"
        case VPackage():
            return "<package>"
        case VCode():
            return "<code>"
    raise TypeError(v)


# --- outcomes ---------------------------------------------------------------------


@dataclass(frozen=True)
class Result:
    value: Value
    store: tuple
    steps: int


@dataclass(frozen=True)
class FuelExhausted:
    steps: int


@dataclass(frozen=True)
class Stuck:
    description: str
    redex: str


Outcome = Union[Result, FuelExhausted, Stuck]


@dataclass(frozen=True)
class StepRecord:
    index: int
    rule: str
    store_size: int
    touched: tuple[int, ...]
    redex: str

    def tsv(self) -> str:
        touched = ",".join(map(str, self.touched)) or "-"
        return f"{self.index}\t{self.rule}\t{self.store_size}\t{touched}"


# --- machine ------------------------------------------------------------------------


class _OutOfFuel(Exception):
    pass


class _StuckError(Exception):
    def __init__(self, description: str, redex: Term):
        self.description = description
        self.redex = redex


@dataclass(frozen=True)
class _Tail:
    term: Term
    env: dict


class Machine:
    def __init__(self, fuel: int, on_step: Optional[Callable[[StepRecord], None]] = None):
        if fuel < 1:
            raise ValueError("fuel must be at least 1")
        self.fuel = fuel
        self.steps = 0
        self.store: list[Value] = []
        self.on_step = on_step

    def charge(self) -> None:
        if self.steps >= self.fuel:
            raise _OutOfFuel
        self.steps += 1

    def record(self, rule: str, redex: Term, touched: tuple[int, ...] = ()) -> None:
        if self.on_step is not None:
            self.on_step(StepRecord(self.steps, rule, len(self.store), touched, pretty(redex)))

    def location(self, v: Value, e: Term) -> int:
        if not isinstance(v, VLoc) or not 0 <= v.index < len(self.store):
            raise _StuckError("not a location", e)
        return v.index

    def run(self, e: Term, env: Optional[dict] = None) -> Outcome:
        try:
            value = self._drive(e, env or {})
        except _OutOfFuel:
            return FuelExhausted(self.steps)
        except _StuckError as err:
            return Stuck(err.description, pretty(err.redex))
        return Result(value, tuple(self.store), self.steps)

    def _drive(self, e: Term, env: dict) -> Value:
        stack = [self._eval(e, env)]
        sent = None
        while True:
            try:
                request = stack[-1].send(sent)
            except StopIteration as stop:
                result = stop.value
                stack.pop()
                if isinstance(result, _Tail):
                    stack.append(self._eval(result.term, result.env))
                    sent = None
                    continue
                if not stack:
                    return result
                sent = result
                continue
            stack.append(self._eval(*request))
            sent = None

    def _eval(self, e: Term, env: dict):
        match e:
            case Lit(value=n):
                return VNat(n)
            case UnitV():
                return UNIT
            case Var(name=n):
                if n not in env:
                    raise _StuckError(f"unbound variable {n}", e)
                return env[n]
            case Lam(param=x, body=body):
                return VClosure(x, body, env)
            case Code(params=params, body=body):
                return VCode(params, body)
            case App(fn=f, arg=a):
                fv = yield (f, env)
                av = yield (a, env)
                return self._apply(fv, av, e)
            case New(init=a):
                v = yield (a, env)
                self.charge()
                self.store.append(v)
                self.record("alloc", e, (len(self.store) - 1,))
                return VLoc(len(self.store) - 1)
            case Deref(ref=r):
                loc = self.location((yield (r, env)), e)
                self.charge()
                self.record("deref", e, (loc,))
                return self.store[loc]
            case Assign(ref=r, value=val):
                rv = yield (r, env)
                v = yield (val, env)
                loc = self.location(rv, e)
                self.charge()
                self.store[loc] = v
                self.record("assign", e, (loc,))
                return UNIT
            case Seq(first=a, second=b):
                yield (a, env)
                return _Tail(b, env)
            case Let(name=x, bound=b, body=body):
                v = yield (b, env)
                self.charge()
                self.record("let", e)
                return _Tail(body, {**env, x: v})
            case Pair(left=a, right=b):
                av = yield (a, env)
                bv = yield (b, env)
                return VPair(av, bv)
            case Proj(index=i, tuple=t):
                v = yield (t, env)
                if not isinstance(v, VPair):
                    raise _StuckError("projection from a non-pair", e)
                self.charge()
                self.record("proj", e)
                return v.left if i == 1 else v.right
            case Pack(witness=w, payload=p):
                v = yield (p, env)
                return VPackage(w, v)
            case Unpack(var=x, package=p, body=body):
                v = yield (p, env)
                if not isinstance(v, VPackage):
                    raise _StuckError("unpack of a non-package", e)
                self.charge()
                self.record("unpack", e)
                return _Tail(body, {**env, x: v.payload})
        raise _StuckError("unknown term", e)

    def _apply(self, f: Value, a: Value, e: Term):
        match f:
            case VClosure(param=x, body=body, env=cenv):
                self.charge()
                self.record("beta", e)
                return _Tail(body, {**cenv, x: a})
            case VCode(params=params, body=body, args=args):
                args = args + (a,)
                if len(args) < len(params):
                    return VCode(params, body, args)
                self.charge()
                self.record("call", e)
                return _Tail(body, {name: v for (name, _), v in zip(params, args)})
        raise _StuckError("application of a non-function", e)


def eval_source(e: Term, fuel: int = DEFAULT_FUEL) -> Outcome:
    return Machine(fuel).run(e)


def eval_target(e: Term, fuel: int = DEFAULT_FUEL) -> Outcome:
    """Evaluate a closure-converted program; code runs only when saturated."""
    return Machine(fuel).run(e)


class _TraceFull(Exception):
    pass


def trace(e: Term, fuel: int = DEFAULT_FUEL, limit: int = 100) -> list[StepRecord]:
    """The first ``limit`` steps of evaluating ``e``."""
    records: list[StepRecord] = []

    def on_step(r: StepRecord) -> None:
        records.append(r)
        if len(records) >= limit:
            raise _TraceFull

    if limit <= 0:
        return records
    try:
        Machine(fuel, on_step).run(e)
    except _TraceFull:
        pass
    return records
