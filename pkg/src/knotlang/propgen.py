"""Random well-typed source programs, and a shrinker for failing ones.

Generation is type-directed: pick a goal type, then build a term inhabiting
it from the productions that can produce that type.  Each mode constrains
lambdas the same way its checker does: under ``FULL_GROUND`` a lambda body
only sees full-ground variables from outside, and under ``SORTED`` a lambda
at level ``j`` only sees outside variables of level at most ``j`` and must
capture at least one variable of level exactly ``j`` when ``j > 0``.
Generated lambdas never carry a level annotation.

The productions lean towards the ingredients of a backpatching cycle:
assignments prefer a reference already in scope, and ``let`` often binds a
cell that holds a function.  A reference goal is only pursued while an
allocation or a suitable variable can still supply it.

Suite configuration files are plain ``key = value`` lines; ``#`` starts a
comment.  Keys are the :class:`GenConfig` field names plus ``weight.<name>``
for the production weights in :data:`DEFAULT_WEIGHTS`, and any extra keys
(``programs``, ``fuel``) the caller wants to read back.
"""

from __future__ import annotations

import dataclasses
import itertools
import random
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Optional

from .context import EMPTY
from .errors import TypingError
from .sorts import is_full_ground, sort_of_source
from .syntax.ast import (
    NAT,
    UNIT_T,
    App,
    Arrow,
    Assign,
    Code,
    Deref,
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
    Type,
    UnitT,
    UnitV,
    Unpack,
    Var,
    children,
    type_children,
)
from .syntax.scope import free_vars
from .typecheck import Mode, typecheck_source

# Relative weights of the productions applicable at a node.  Lambdas and the
# reference forms (new, !, :=) each get a quarter of the total mass.
DEFAULT_WEIGHTS: Mapping[str, float] = {
    "lam": 4.0,
    "ref": 4.0,
    "var": 1.5,
    "lit": 1.0,
    "app": 2.0,
    "let": 2.0,
    "seq": 0.5,
    "pair": 0.5,
    "proj": 0.5,
}

MAX_ATTEMPTS = 50
# Past the soft budget of live nodes only leaf and structural productions are
# offered, so a deep configuration winds down instead of growing without
# bound; the work budget (nodes tried, including abandoned branches) caps the
# cost of one attempt.
_SOFT_BUDGET = 120
_WORK_BUDGET = 2000


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    max_depth: int = 5
    max_allocs: int = 4
    mode: Mode = Mode.UNRESTRICTED
    level_cap: int = 3
    weights: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))

    def __post_init__(self):
        if not 0 <= self.level_cap <= 3:
            raise ValueError("level_cap must be between 0 and 3")
        if self.max_depth < 0 or self.max_allocs < 0:
            raise ValueError("max_depth and max_allocs must be non-negative")


def parse_config(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"line {lineno}: expected key = value")
        out[key.strip()] = value.strip()
    return out


def config_from_mapping(values: Mapping[str, str]) -> GenConfig:
    kwargs: dict = {}
    weights = dict(DEFAULT_WEIGHTS)
    for key, value in values.items():
        if key.startswith("weight."):
            name = key[len("weight."):]
            if name not in weights:
                raise ValueError(f"unknown production {name!r}")
            weights[name] = float(value)
        elif key == "mode":
            kwargs["mode"] = Mode.parse(value)
        elif key in ("seed", "max_depth", "max_allocs", "level_cap"):
            kwargs[key] = int(value)
    return GenConfig(weights=weights, **kwargs)


def ref_depth(t: Type) -> int:
    """Largest number of ``Ref`` constructors on any path through ``t``."""
    below = max((ref_depth(c) for c in type_children(t)), default=0)
    return below + 1 if isinstance(t, Ref) else below


def _occurs(t: Type, within: Type) -> bool:
    return t == within or any(_occurs(t, c) for c in type_children(within))


class GenFail(Exception):
    pass


class _Gen:
    def __init__(self, cfg: GenConfig, rng: random.Random):
        self.cfg = cfg
        self.mode = cfg.mode
        self.rng = rng
        self.allocs = 0
        self.nodes = 0
        self.work = 0
        self.names = (f"x{i}" for i in itertools.count())

    # -- types --

    def level(self, t: Type) -> int:
        return sort_of_source(EMPTY, t)

    def fits(self, t: Type) -> bool:
        if ref_depth(t) > self.cfg.level_cap:
            return False
        return self.mode is not Mode.SORTED or self.level(t) <= self.cfg.level_cap

    def _arrow_level(self, env) -> Optional[int]:
        """A closure level some visible variable can supply (sorted mode only)."""
        if self.mode is not Mode.SORTED:
            return None
        return self.rng.choice(sorted({0} | {self.level(t) for _, t in env if self.level(t) <= self.cfg.level_cap}))

    def buildable(self, t: Type, env, depth: int = 1) -> bool:
        """Whether ``t`` can still be inhabited without more than the
        remaining allocations: every reference must come from a ``new`` or
        from a variable.  At depth 0 only an exact variable will do; deeper,
        any variable whose type contains ``t`` can be taken apart."""
        if any(t == ty if depth == 0 else _occurs(t, ty) for _, ty in env):
            return True
        sub = max(depth - 1, 0)
        match t:
            case Ref():
                return self.allocs < self.cfg.max_allocs
            case Product(left=a, right=b):
                return self.buildable(a, env, sub) and self.buildable(b, env, sub)
            case Arrow(dom=a, cod=b):
                return self.buildable(b, [*env, ("", a)], sub)
        return True

    def random_type(self, size: int = 2, env=()) -> Type:
        # arrow levels are drawn from levels some visible variable can supply,
        # otherwise a lambda of that type could never be built
        levels = sorted({0} | {self.level(t) for _, t in env} if self.mode is Mode.SORTED else {0})
        for _ in range(20):
            t = self._random_type(size, levels)
            if self.fits(t) and self.buildable(t, env):
                return t
        return NAT

    def _random_type(self, size: int, levels=None) -> Type:
        options = ["nat", "nat", "nat", "unit"]
        if size > 0:
            options += ["ref", "ref", "arrow", "arrow", "pair"]
        pick = self.rng.choice(options)
        if pick == "nat":
            return NAT
        if pick == "unit":
            return UNIT_T
        if pick == "ref":
            return Ref(self._random_type(size - 1, levels))
        if pick == "pair":
            return Product(self._random_type(size - 1, levels), self._random_type(size - 1, levels))
        level = None
        if self.mode is Mode.SORTED:
            level = self.rng.choice(levels) if levels else self.rng.randint(0, self.cfg.level_cap)
        return Arrow(self._random_type(size - 1, levels), self._random_type(size - 1, levels), level)

    # -- terms --

    def gen(self, goal: Type, env: list[tuple[str, Type]], depth: int) -> Term:
        self.work += 1
        if self.work > _WORK_BUDGET:
            raise GenFail("work budget")
        if self.nodes >= _SOFT_BUDGET:
            depth = 0
        if not self.buildable(goal, env, depth):
            raise GenFail("out of allocations")
        self.nodes += 1
        live, allocs = self.nodes, self.allocs
        options = self.options(goal, env, depth)
        while options:
            weights = [w for _, w, _ in options]
            i = self.rng.choices(range(len(options)), weights)[0]
            _, _, build = options.pop(i)
            try:
                return build()
            except GenFail:
                if self.work > _WORK_BUDGET:
                    raise
                # the abandoned branch is not part of the term
                self.nodes, self.allocs = live, allocs
        raise GenFail("no production")

    def options(self, goal: Type, env, depth: int) -> list[tuple[str, float, Callable[[], Term]]]:
        w = self.cfg.weights
        opts: list[tuple[str, float, Callable[[], Term]]] = []

        def add(name: str, build: Callable[[], Term], weight: Optional[float] = None) -> None:
            opts.append((name, w[name] if weight is None else weight, build))

        for name, ty in env:
            if ty == goal:
                add("var", lambda name=name: Var(name))
        # literals end a branch; inner nodes prefer to keep building
        lit_weight = w["lit"] if depth <= 1 else w["lit"] / 4
        if isinstance(goal, Nat):
            add("lit", lambda: Lit(self.rng.randint(0, 9)), lit_weight)
        if isinstance(goal, UnitT):
            add("lit", lambda: UnitV(), lit_weight)

        # structural forms stay available at depth 0 so every type is inhabited
        sub = max(depth - 1, 0)
        if isinstance(goal, Ref) and self.allocs < self.cfg.max_allocs:
            add("ref", lambda: self.new(goal, env, sub))
        if isinstance(goal, Product):
            add("pair", lambda: Pair(self.gen(goal.left, env, sub), self.gen(goal.right, env, sub)))
        if isinstance(goal, Arrow):
            add("lam", lambda: self.lam(goal, env, sub))
        if depth == 0:
            return opts

        d = depth - 1
        if self.fits(Ref(goal)):
            add("ref", lambda: Deref(self.gen(Ref(goal), env, d)))
        if isinstance(goal, UnitT):
            add("ref", lambda: self.assign(env, d))
            add("seq", lambda: Seq(self.gen(UNIT_T, env, d), self.gen(UNIT_T, env, d)))
        add("app", lambda: self.app(goal, env, d))
        add("let", lambda: self.let(goal, env, d))
        if not isinstance(goal, UnitT):
            add("seq", lambda: Seq(self.gen(UNIT_T, env, d), self.gen(goal, env, d)))
        add("proj", lambda: self.proj(goal, env, d))
        return opts

    def new(self, goal: Ref, env, depth: int) -> Term:
        self.allocs += 1
        return New(self.gen(goal.content, env, depth))

    def assign(self, env, depth: int) -> Term:
        # prefer writing to a reference already in scope: that is how a
        # backpatch closes a cycle through the store
        refs = [t.content for _, t in env if isinstance(t, Ref)]
        t = self.rng.choice(refs) if refs and self.rng.random() < 0.6 else self.random_type(1, env)
        if not self.fits(Ref(t)):
            raise GenFail("assign")
        return Assign(self.gen(Ref(t), env, depth), self.gen(t, env, depth))

    def app(self, goal: Type, env, depth: int) -> Term:
        dom = self.random_type(1, env)
        fn_type = Arrow(dom, goal, self._arrow_level(env))
        if not self.fits(fn_type):
            raise GenFail("app")
        return App(self.gen(fn_type, env, depth), self.gen(dom, env, depth))

    def let(self, goal: Type, env, depth: int) -> Term:
        t = self.random_type(2, env)
        if self.rng.random() < 0.3:
            # a cell holding a function, the other ingredient of a knot
            t = Ref(self.random_type(1, env)) if isinstance(t, Arrow) else Ref(Arrow(NAT, NAT, self._arrow_level(env)))
            if not (self.fits(t) and self.buildable(t, env)):
                t = self.random_type(2, env)
        x = next(self.names)
        bound = self.gen(t, env, depth)
        return Let(x, bound, self.gen(goal, env + [(x, t)], depth))

    def proj(self, goal: Type, env, depth: int) -> Term:
        other = self.random_type(1, env)
        first = self.rng.random() < 0.5
        pt = Product(goal, other) if first else Product(other, goal)
        if not self.fits(pt):
            raise GenFail("proj")
        return Proj(1 if first else 2, self.gen(pt, env, depth))

    def lam(self, goal: Arrow, env, depth: int) -> Term:
        if self.mode is Mode.FULL_GROUND:
            visible = [(n, t) for n, t in env if is_full_ground(t)]
        elif self.mode is Mode.SORTED:
            visible = [(n, t) for n, t in env if self.level(t) <= goal.level]
        else:
            visible = list(env)
        x = next(self.names)
        body = self.gen(goal.cod, visible + [(x, goal.dom)], depth)
        if self.mode is Mode.SORTED and goal.level > 0:
            types = dict(visible)
            captured = max((self.level(types[v]) for v in free_vars(Lam(x, goal.dom, body))), default=0)
            if captured < goal.level:
                witnesses = [n for n, t in visible if self.level(t) == goal.level]
                if not witnesses:
                    raise GenFail("no variable at the closure's level")
                body = Let(next(self.names), Var(self.rng.choice(witnesses)), body)
        return Lam(x, goal.dom, body)

    def program(self) -> Term:
        if self.cfg.max_depth == 0:
            goal = self.rng.choice([NAT, UNIT_T])
        elif self.rng.random() < 0.7:
            goal = NAT
        else:
            goal = self.random_type()
        return self.gen(goal, [], self.cfg.max_depth)


def generate_once(cfg: GenConfig, attempt: int = 0) -> Term:
    """One generation attempt; raises :class:`GenFail` if it dead-ends."""
    rng = random.Random(f"{cfg.seed}:{attempt}")
    return _Gen(cfg, rng).program()


def generate(cfg: GenConfig) -> Term:
    """A term that type checks in ``cfg.mode``; deterministic per config."""
    for attempt in range(MAX_ATTEMPTS):
        try:
            e = generate_once(cfg, attempt)
            typecheck_source(EMPTY, e, cfg.mode)
            return e
        except (GenFail, TypingError):
            continue
    return Lit(0)


def random_types(seed: int, count: int, mode: Mode = Mode.SORTED, level_cap: int = 3) -> Iterator[Type]:
    gen = _Gen(GenConfig(seed=seed, mode=mode, level_cap=level_cap), random.Random(seed))
    for _ in range(count):
        yield gen._random_type(gen.rng.randint(0, 3))


# --- shrinking ---------------------------------------------------------------------

_CHILD_FIELDS = {
    Lam: ("body",),
    Code: ("body",),
    App: ("fn", "arg"),
    New: ("init",),
    Deref: ("ref",),
    Assign: ("ref", "value"),
    Seq: ("first", "second"),
    Let: ("bound", "body"),
    Pair: ("left", "right"),
    Proj: ("tuple",),
    Pack: ("payload",),
    Unpack: ("package", "body"),
}


def term_size(e: Term) -> tuple[int, int]:
    """Shrink order: node count, then total literal magnitude."""
    nodes = lits = 0
    stack = [e]
    while stack:
        t = stack.pop()
        nodes += 1
        if isinstance(t, Lit):
            lits += t.value
        stack.extend(children(t))
    return nodes, lits


def _candidates(e: Term) -> Iterator[Term]:
    if isinstance(e, Let) and e.name not in free_vars(e.body):
        yield e.body
    yield from children(e)
    if isinstance(e, Lit) and e.value > 0:
        yield Lit(0)
    for fname in _CHILD_FIELDS.get(type(e), ()):
        for c in _candidates(getattr(e, fname)):
            yield dataclasses.replace(e, **{fname: c})


def shrink(e: Term, failing: Callable[[Term], bool]) -> Term:
    """Greedily simplify ``e`` while ``failing`` keeps holding."""
    while True:
        size = term_size(e)
        for c in _candidates(e):
            if term_size(c) < size and failing(c):
                e = c
                break
        else:
            return e
