"""Typed closure conversion and the sorted package rule.

Every lambda becomes a package `pack <Env, <code, env>>` whose environment
type is hidden behind an existential.  In sorted mode the existential is
annotated with the environment's level, so `id` (empty environment) lives at
Type 0 and `f` (environment holding r) lives at Type 1.

    python demos/02_closure_conversion.py
"""

from importlib import resources

from knotlang import EMPTY, Mode, TypingError, closure_convert, explain, parse_source, pretty, typecheck_target
from knotlang.cconv import convert_context
from knotlang.cli import F_CONTEXT, F_SOURCE

corpus = resources.files("knotlang").joinpath("corpus")
knot = parse_source(corpus.joinpath("knot.src").read_text())

print("== the knot, closure-converted under the unrestricted discipline ==\n")
print(pretty(closure_convert(knot, Mode.UNRESTRICTED), multiline=True))

print("\n== derivation for id ==\n")
id_target = closure_convert(parse_source("lam x : Nat . x"), Mode.SORTED)
print(explain(id_target, Mode.SORTED).render())

print(f"\n== derivation for f = {F_SOURCE}, with r : Ref (Nat ->[0] Nat) ==\n")
f_target = closure_convert(parse_source(F_SOURCE), Mode.SORTED, F_CONTEXT)
print(explain(f_target, Mode.SORTED, convert_context(F_CONTEXT, Mode.SORTED)).render())

print("\n== the converted knot under the sorted target checker ==\n")
try:
    typecheck_target(EMPTY, closure_convert(knot, Mode.SORTED), Mode.SORTED)
except TypingError as err:
    print(err.render("knot.src"))
