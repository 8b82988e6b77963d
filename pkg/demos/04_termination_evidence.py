"""Evidence (not proof) that sorted programs terminate.

Generates random well-typed programs under the sorted discipline, runs each
with a large step budget both directly and after closure conversion, and
reports any program that fails to finish, shrunk to a small witness.  A
clean run is evidence for the termination conjecture; it proves nothing.

    python demos/04_termination_evidence.py [count] [depth]
"""

import sys

from knotlang import EMPTY, Mode, TypingError, closure_convert, pretty, typecheck_source
from knotlang.eval import Result, eval_source, eval_target
from knotlang.propgen import GenConfig, generate, shrink, term_size

count = int(sys.argv[1]) if len(sys.argv) > 1 else 300
depth = int(sys.argv[2]) if len(sys.argv) > 2 else 8
fuel = 100_000


def diverges(e) -> bool:
    try:
        typecheck_source(EMPTY, e, Mode.SORTED)
    except TypingError:
        return False
    return not isinstance(eval_source(e, fuel), Result)


longest, largest, failures = 0, 0, []
for seed in range(count):
    e = generate(GenConfig(seed=seed, max_depth=depth, mode=Mode.SORTED, level_cap=3))
    src = eval_source(e, fuel)
    tgt = eval_target(closure_convert(e, Mode.SORTED), 4 * fuel)
    if not (isinstance(src, Result) and isinstance(tgt, Result)):
        failures.append(e)
        continue
    longest = max(longest, src.steps)
    largest = max(largest, term_size(e)[0])

print(f"{count} sorted programs (depth {depth}): {count - len(failures)} terminated")
print(f"largest program {largest} nodes, longest run {longest} steps")
for e in failures:
    print("non-terminating within fuel:", pretty(shrink(e, diverges)))
if not failures:
    print("no counterexample found -- evidence, not proof")
