"""Landin's Knot under the three typing disciplines.

The knot stores the identity function in a reference r, defines f to call
whatever r holds, then overwrites r with f itself.  Calling f now loops
forever through the store.

    python demos/01_knot_three_modes.py
"""

from importlib import resources

from knotlang import EMPTY, Mode, TypingError, parse_source, pretty, typecheck_source
from knotlang.eval import eval_source

text = resources.files("knotlang").joinpath("corpus", "knot.src").read_text()
knot = parse_source(text)

print("The program:\n")
print("    " + pretty(knot, multiline=True).replace("\n", "\n    "))
print()

for mode in Mode:
    try:
        ty = typecheck_source(EMPTY, knot, mode)
        print(f"{mode.value:>13}: accepted at {pretty(ty)}")
    except TypingError as err:
        print(f"{mode.value:>13}: rejected -- {err.render('knot.src')}")

print()
print("Running the accepted (unrestricted) program with a budget of 10000 steps:")
print("   ", eval_source(knot, 10_000))
print()
print("Full-ground mode refuses to let f capture r at all, because r holds a")
print("function.  Sorted mode lets f capture r, but that makes f a level-1")
print("closure (r : Ref (Nat ->[0] Nat) sits at level 1), and a level-1 closure")
print("cannot be stored back into a cell of level-0 closures.")
