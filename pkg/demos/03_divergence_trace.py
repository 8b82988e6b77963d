"""Watching the knot loop.

The step trace shows the single store write `r := f`, after which the
evaluator alternates forever between reading r and calling what it read.
The same program without the write finishes in seven steps.

    python demos/03_divergence_trace.py
"""

from importlib import resources

from knotlang import parse_source
from knotlang.eval import eval_source, trace

corpus = resources.files("knotlang").joinpath("corpus")

knot = parse_source(corpus.joinpath("knot.src").read_text())
print("step\trule\tstore\ttouched\tredex")
for record in trace(knot, fuel=10_000, limit=14):
    print(f"{record.tsv()}\t{record.redex}")
print("...")
print(eval_source(knot, 10_000))

print("\nWithout the backpatch:")
plain = parse_source(corpus.joinpath("knot_nobackpatch.src").read_text())
for record in trace(plain, fuel=100, limit=100):
    print(f"{record.tsv()}\t{record.redex}")
print(eval_source(plain, 100))
